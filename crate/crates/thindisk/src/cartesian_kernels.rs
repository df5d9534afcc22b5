//! Closed-form cell integrals of the in-plane force kernel on a Cartesian grid.
//!
//! For a field cell `(i, j)` and a source cell at offset `(di, dj) = (i - i', j - j')`,
//! the six kernels integrate `(x̄ - x_i)/ρ³` and `(ȳ - y_j)/ρ³`, weighted by
//! `1`, `(x̄ - x_{i'})` or `(ȳ - y_{j'})`, over the source cell. Each is the
//! four-corner difference of an elementary antiderivative.

use std::sync::OnceLock;

use ndarray::Array2;
use rayon::prelude::*;

use crate::convolve::{wrap_offset, Convolver, Layout, PaddedSpectrum};
use crate::error::{invalid, Result};
use crate::grid::CartesianGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CartesianKernel {
    X0,
    XX,
    XY,
    Y0,
    YX,
    YY,
}

impl CartesianKernel {
    pub const ALL: [CartesianKernel; 6] = [Self::X0, Self::XX, Self::XY, Self::Y0, Self::YX, Self::YY];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::X0 => "x0",
            Self::XX => "xx",
            Self::XY => "xy",
            Self::Y0 => "y0",
            Self::YX => "yx",
            Self::YY => "yy",
        }
    }
}

/// `ln(p + √(p² + q²))` without cancellation for negative `p`.
///
/// When `q = 0` and `p < 0` the true value is `-∞`; the `2 ln|q|` part is
/// dropped because it cancels between the two corners sharing that `q`.
fn log_sum(p: f64, q: f64) -> f64 {
    let rho = p.hypot(q);
    if p >= 0.0 {
        (p + rho).ln()
    } else if q != 0.0 {
        2.0 * q.abs().ln() - (rho - p).ln()
    } else {
        -(rho - p).ln()
    }
}

/// Antiderivative of the kernel integrand in `(a, b) = (x̄ - x_i, ȳ - y_j)`,
/// excluding the offset-proportional part of the weighted kernels.
fn corner(kind: CartesianKernel, a: f64, b: f64) -> f64 {
    match kind {
        CartesianKernel::X0 => -log_sum(b, a),
        CartesianKernel::Y0 => -log_sum(a, b),
        CartesianKernel::XX => {
            if b == 0.0 {
                0.0
            } else {
                b * log_sum(a, b)
            }
        }
        CartesianKernel::YY => {
            if a == 0.0 {
                0.0
            } else {
                a * log_sum(b, a)
            }
        }
        CartesianKernel::XY | CartesianKernel::YX => -a.hypot(b),
    }
}

fn zero_kind(kind: CartesianKernel) -> CartesianKernel {
    match kind {
        CartesianKernel::X0 | CartesianKernel::XX | CartesianKernel::XY => CartesianKernel::X0,
        _ => CartesianKernel::Y0,
    }
}

/// Position of corner `m` along an axis, relative to the field point.
#[inline]
fn corner_position(m: i64, dx: f64) -> f64 {
    (m as f64 - 0.5) * dx
}

#[inline]
fn corner_difference(g: impl Fn(i64, i64) -> f64, di: i64, dj: i64) -> f64 {
    let (k, l) = (-di, -dj);
    g(k + 1, l + 1) - g(k, l + 1) - g(k + 1, l) + g(k, l)
}

fn combine(kind: CartesianKernel, di: i64, dj: i64, dx: f64, zero: f64, rest: f64) -> f64 {
    match kind {
        CartesianKernel::X0 | CartesianKernel::Y0 => zero,
        CartesianKernel::XX | CartesianKernel::YX => (di as f64 * dx) * zero + rest,
        CartesianKernel::XY | CartesianKernel::YY => (dj as f64 * dx) * zero + rest,
    }
}

/// Kernel value for offset `(di, dj)`, with `|di|, |dj| ≤ N`.
pub fn eval_cartesian_kernel(kind: CartesianKernel, di: i64, dj: i64, grid: &CartesianGrid) -> Result<f64> {
    let n = grid.n() as i64;
    if di.abs() > n || dj.abs() > n {
        return invalid(format!("offset ({di}, {dj}) outside [-{n}, {n}]"));
    }
    Ok(kernel_value(kind, di, dj, grid.spacing()))
}

fn kernel_value(kind: CartesianKernel, di: i64, dj: i64, dx: f64) -> f64 {
    let at = |k: CartesianKernel| {
        move |m: i64, l: i64| corner(k, corner_position(m, dx), corner_position(l, dx))
    };
    let zero = corner_difference(at(zero_kind(kind)), di, dj);
    if matches!(kind, CartesianKernel::X0 | CartesianKernel::Y0) {
        return zero;
    }
    let rest = corner_difference(at(kind), di, dj);
    combine(kind, di, dj, dx, zero, rest)
}

/// Integral of the kernel over an arbitrary rectangle `[a0, a1] × [b0, b1]`
/// given relative to the field point, without the offset-proportional part.
pub fn rectangle_integral(kind: CartesianKernel, (a0, a1): (f64, f64), (b0, b1): (f64, f64)) -> f64 {
    let g = |a, b| corner(kind, a, b);
    g(a1, b1) - g(a0, b1) - g(a1, b0) + g(a0, b0)
}

/// The six kernels over offsets `[-N+1, N]²` in the padded periodic layout.
#[derive(Debug)]
pub struct KernelTables {
    grid: CartesianGrid,
    tables: Vec<Array2<f64>>,
    spectra: OnceLock<(Convolver, Vec<PaddedSpectrum>)>,
}

impl Clone for KernelTables {
    fn clone(&self) -> Self {
        Self { grid: self.grid.clone(), tables: self.tables.clone(), spectra: OnceLock::new() }
    }
}

impl KernelTables {
    pub fn tabulate(grid: &CartesianGrid) -> Self {
        let n = grid.n();
        let len = 2 * n;
        let dx = grid.spacing();
        // corners m ∈ [-N, N]: index m + N
        let side = 2 * n + 1;
        let corners = |kind: CartesianKernel| -> Vec<f64> {
            let mut v = vec![0.0; side * side];
            v.par_chunks_mut(side).enumerate().for_each(|(p, line)| {
                let a = corner_position(p as i64 - n as i64, dx);
                for (q, out) in line.iter_mut().enumerate() {
                    *out = corner(kind, a, corner_position(q as i64 - n as i64, dx));
                }
            });
            v
        };
        let fill = |values: &(dyn Fn(i64, i64) -> f64 + Sync)| -> Array2<f64> {
            let mut data = vec![0.0; len * len];
            data.par_chunks_mut(len).enumerate().for_each(|(r, line)| {
                let di = crate::convolve::unwrap_offset(r, len);
                for (c, out) in line.iter_mut().enumerate() {
                    *out = values(di, crate::convolve::unwrap_offset(c, len));
                }
            });
            Array2::from_shape_vec((len, len), data).expect("shape")
        };
        let mut tables = Vec::with_capacity(6);
        let families = [
            [CartesianKernel::X0, CartesianKernel::XX, CartesianKernel::XY],
            [CartesianKernel::Y0, CartesianKernel::YX, CartesianKernel::YY],
        ];
        for family in families {
            let zc = corners(family[0]);
            let at = |c: &Vec<f64>, m: i64, l: i64| c[(m + n as i64) as usize * side + (l + n as i64) as usize];
            let zero = fill(&|di, dj| corner_difference(|m, l| at(&zc, m, l), di, dj));
            let weighted: Vec<Array2<f64>> = family[1..]
                .iter()
                .map(|&kind| {
                    let rc = corners(kind);
                    fill(&|di, dj| {
                        let z = zero[[wrap_offset(di, len), wrap_offset(dj, len)]];
                        let rest = corner_difference(|m, l| at(&rc, m, l), di, dj);
                        combine(kind, di, dj, dx, z, rest)
                    })
                })
                .collect();
            tables.push(zero);
            tables.extend(weighted);
        }
        Self { grid: grid.clone(), tables, spectra: OnceLock::new() }
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    /// Padded `2N × 2N` table for `kind`.
    pub fn table(&self, kind: CartesianKernel) -> &Array2<f64> {
        &self.tables[kind.index()]
    }

    /// Entry for offset `(di, dj)` with both in `[-N+1, N]`.
    pub fn get(&self, kind: CartesianKernel, di: i64, dj: i64) -> f64 {
        let len = 2 * self.grid.n();
        self.tables[kind.index()][[wrap_offset(di, len), wrap_offset(dj, len)]]
    }

    /// FFT plans and kernel spectra, computed once on first use.
    pub fn spectra(&self) -> &(Convolver, Vec<PaddedSpectrum>) {
        self.spectra.get_or_init(|| {
            let conv = Convolver::new(self.grid.n(), Layout::Aperiodic).expect("valid size");
            let spectra = self
                .tables
                .iter()
                .map(|t| conv.kernel_spectrum(t).expect("padded shape"))
                .collect();
            (conv, spectra)
        })
    }

    pub(crate) fn from_raw(grid: CartesianGrid, tables: Vec<Array2<f64>>) -> Result<Self> {
        let len = 2 * grid.n();
        if tables.len() != 6 || tables.iter().any(|t| t.dim() != (len, len)) {
            return invalid("Cartesian kernel cache has the wrong shape");
        }
        Ok(Self { grid, tables, spectra: OnceLock::new() })
    }

    pub(crate) fn raw(&self) -> &[Array2<f64>] {
        &self.tables
    }
}

/// Tabulates all six Cartesian kernels for `grid`.
pub fn tabulate_cartesian_kernels(grid: &CartesianGrid) -> KernelTables {
    KernelTables::tabulate(grid)
}
