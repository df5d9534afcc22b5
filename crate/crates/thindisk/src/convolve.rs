//! Discrete convolutions by zero-padded FFT and by direct summation.
//!
//! Kernels are stored over offsets laid out periodically: the entry for
//! offset `d` along a padded axis of length `2N` lives at `d mod 2N`. On the
//! polar layout the angular axis has length `N` and is genuinely periodic.

use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Both axes zero-padded to `2N` (Cartesian grids).
    Aperiodic,
    /// First axis zero-padded to `2N`, second axis periodic with length `N` (polar grids).
    RadialPadded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Kernel,
    Field,
}

/// Spectrum of a padded kernel or field.
#[derive(Debug, Clone)]
pub struct PaddedSpectrum {
    data: Array2<Complex64>,
    provenance: Provenance,
}

impl PaddedSpectrum {
    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// FFT plans for one grid size and layout; cheap to share between threads.
#[derive(Clone)]
pub struct Convolver {
    n: usize,
    layout: Layout,
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("n", &self.n)
            .field("layout", &self.layout)
            .finish()
    }
}

impl Convolver {
    pub fn new(n: usize, layout: Layout) -> Result<Self> {
        if n == 0 {
            return invalid("convolution size must be positive");
        }
        let rows = 2 * n;
        let cols = match layout {
            Layout::Aperiodic => 2 * n,
            Layout::RadialPadded => n,
        };
        let mut planner = FftPlanner::new();
        // row_* transform along the second axis (contiguous), col_* along the first.
        Ok(Self {
            n,
            layout,
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn padded_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn transform(&self, data: &mut Array2<Complex64>, forward: bool) {
        let (rows, cols) = (self.rows, self.cols);
        let (along_cols, along_rows) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        let buf = data.as_slice_mut().expect("standard layout");
        fft_lines(along_cols.as_ref(), buf, cols);
        let mut t = vec![Complex64::new(0.0, 0.0); rows * cols];
        transpose_into(buf, &mut t, rows, cols);
        fft_lines(along_rows.as_ref(), &mut t, rows);
        transpose_into(&t, buf, cols, rows);
    }

    /// Forward transform of an array that already has the padded shape.
    pub fn forward(&self, padded: &Array2<f64>, provenance: Provenance) -> Result<PaddedSpectrum> {
        if padded.dim() != (self.rows, self.cols) {
            return invalid(format!(
                "padded array must be {}×{}, got {:?}",
                self.rows,
                self.cols,
                padded.dim()
            ));
        }
        let mut data = padded.mapv(|v| Complex64::new(v, 0.0));
        self.transform(&mut data, true);
        Ok(PaddedSpectrum { data, provenance })
    }

    pub fn kernel_spectrum(&self, padded_kernel: &Array2<f64>) -> Result<PaddedSpectrum> {
        self.forward(padded_kernel, Provenance::Kernel)
    }

    /// Zero-extends an `N × N` field to the padded shape and transforms it.
    pub fn field_spectrum(&self, field: ArrayView2<f64>) -> Result<PaddedSpectrum> {
        if field.dim() != (self.n, self.n) {
            return invalid(format!("field must be {n}×{n}, got {:?}", field.dim(), n = self.n));
        }
        let mut padded = Array2::zeros((self.rows, self.cols));
        padded.slice_mut(ndarray::s![..self.n, ..self.n]).assign(&field);
        self.forward(&padded, Provenance::Field)
    }

    /// Real part of the inverse transform over the full padded shape.
    pub fn inverse(&self, spectrum: &PaddedSpectrum) -> Array2<f64> {
        let mut data = spectrum.data.clone();
        self.transform(&mut data, false);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        data.mapv(|c| c.re * scale)
    }

    /// `Σ kernel_k ⊛ field_k`, cropped to the `N × N` block.
    pub fn convolve_sum(&self, terms: &[(&PaddedSpectrum, &PaddedSpectrum)]) -> Result<Array2<f64>> {
        let mut acc = Array2::<Complex64>::zeros((self.rows, self.cols));
        for (k, f) in terms {
            if k.data.dim() != acc.dim() || f.data.dim() != acc.dim() {
                return invalid("spectrum shape does not match the convolver");
            }
            ndarray::Zip::from(&mut acc)
                .and(&k.data)
                .and(&f.data)
                .for_each(|a, &x, &y| *a += x * y);
        }
        self.transform(&mut acc, false);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        Ok(acc.slice(ndarray::s![..self.n, ..self.n]).mapv(|c| c.re * scale))
    }

    pub fn convolve(&self, kernel: &PaddedSpectrum, field: ArrayView2<f64>) -> Result<Array2<f64>> {
        let f = self.field_spectrum(field)?;
        self.convolve_sum(&[(kernel, &f)])
    }

    /// Per-row spectra of an `N × N` array of ring kernels `K[i, dj]`.
    pub fn ring_kernel_spectra(&self, kernel_rows: &Array2<f64>) -> Result<Array2<Complex64>> {
        if kernel_rows.dim() != (self.n, self.n) {
            return invalid(format!("ring kernel must be {n}×{n}", n = self.n));
        }
        let mut data = kernel_rows.mapv(|v| Complex64::new(v, 0.0));
        let fft = FftPlanner::new().plan_fft_forward(self.n);
        fft_lines(fft.as_ref(), data.as_slice_mut().expect("standard layout"), self.n);
        Ok(data)
    }

    /// `out[i, j] = Σ_{j'} K[i, (j - j') mod N] ring[j']` for each row `i`,
    /// accumulated over several (kernel, ring) pairs.
    pub fn ring_convolve_sum(&self, terms: &[(&Array2<Complex64>, &[f64])]) -> Result<Array2<f64>> {
        let n = self.n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut acc = Array2::<Complex64>::zeros((n, n));
        for (spec, ring) in terms {
            if spec.dim() != (n, n) || ring.len() != n {
                return invalid("ring convolution shape mismatch");
            }
            let mut r: Vec<Complex64> = ring.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fwd.process(&mut r);
            for ((i, j), a) in acc.indexed_iter_mut() {
                *a += spec[[i, j]] * r[j];
            }
        }
        fft_lines(inv.as_ref(), acc.as_slice_mut().expect("standard layout"), n);
        let scale = 1.0 / n as f64;
        Ok(acc.mapv(|c| c.re * scale))
    }
}

fn fft_lines(fft: &dyn Fft<f64>, buf: &mut [Complex64], len: usize) {
    let scratch_len = fft.get_inplace_scratch_len();
    buf.par_chunks_mut(len).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, line| fft.process_with_scratch(line, scratch),
    );
}

const TILE: usize = 32;

/// Writes the `cols × rows` transpose of row-major `src` into `dst`, tile by tile.
fn transpose_into(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(TILE * rows).enumerate().for_each(|(block, out)| {
        let c0 = block * TILE;
        let width = out.len() / rows;
        for r0 in (0..rows).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                let line = &src[r * cols + c0..r * cols + c0 + width];
                for (dc, v) in line.iter().enumerate() {
                    out[dc * rows + r] = *v;
                }
            }
        }
    });
}

/// Places `value(di, dj)` into the periodic layout for all stored offsets.
pub fn layout_kernel<F: Fn(i64, i64) -> f64 + Sync>(n: usize, layout: Layout, value: F) -> Array2<f64> {
    let rows = 2 * n;
    let cols = match layout {
        Layout::Aperiodic => 2 * n,
        Layout::RadialPadded => n,
    };
    let mut data = vec![0.0; rows * cols];
    data.par_chunks_mut(cols).enumerate().for_each(|(r, line)| {
        let di = unwrap_offset(r, rows);
        for (c, v) in line.iter_mut().enumerate() {
            let dj = match layout {
                Layout::Aperiodic => unwrap_offset(c, cols),
                Layout::RadialPadded => c as i64,
            };
            *v = value(di, dj);
        }
    });
    Array2::from_shape_vec((rows, cols), data).expect("shape")
}

/// Offset stored at padded index `k` of an axis of length `len`: `[-len/2+1, len/2]`.
pub fn unwrap_offset(k: usize, len: usize) -> i64 {
    let half = (len / 2) as i64;
    let k = k as i64;
    if k > half {
        k - len as i64
    } else {
        k
    }
}

/// Index of offset `d` in a padded axis of length `len`.
pub fn wrap_offset(d: i64, len: usize) -> usize {
    d.rem_euclid(len as i64) as usize
}

/// Zero-padded FFT convolution of a laid-out kernel with an `N × N` field.
pub fn fft_convolve(kernel: &Array2<f64>, field: ArrayView2<f64>, layout: Layout) -> Result<Array2<f64>> {
    let n = field.nrows();
    if field.ncols() != n {
        return invalid("field must be square");
    }
    let conv = Convolver::new(n, layout)?;
    let k = conv.kernel_spectrum(kernel)?;
    conv.convolve(&k, field)
}

/// Literal double sum `out[i, j] = Σ K(i - i', j - j') f[i', j']`.
///
/// On the polar layout the angular offset passed to `kernel` is reduced to `[0, N)`.
pub fn direct_convolve<F: Fn(i64, i64) -> f64 + Sync>(kernel: F, field: ArrayView2<f64>, layout: Layout) -> Array2<f64> {
    let (n, m) = field.dim();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = 0.0;
                    for ip in 0..n {
                        let di = i as i64 - ip as i64;
                        for jp in 0..m {
                            let dj = j as i64 - jp as i64;
                            let dj = match layout {
                                Layout::Aperiodic => dj,
                                Layout::RadialPadded => dj.rem_euclid(m as i64),
                            };
                            acc += kernel(di, dj) * field[[ip, jp]];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Array2::from_shape_fn((n, m), |(i, j)| rows[i][j])
}

/// Direct sum over a laid-out kernel table.
pub fn direct_convolve_table(kernel: &Array2<f64>, field: ArrayView2<f64>, layout: Layout) -> Array2<f64> {
    let (rows, cols) = kernel.dim();
    direct_convolve(
        |di, dj| kernel[[wrap_offset(di, rows), wrap_offset(dj, cols)]],
        field,
        layout,
    )
}
