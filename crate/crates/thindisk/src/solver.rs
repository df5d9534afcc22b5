//! Force assembly from kernel tables and density fields.

use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex64;

use crate::cartesian_kernels::{CartesianKernel, KernelTables};
use crate::convolve::{direct_convolve_table, Convolver, Layout, PaddedSpectrum};
use crate::density::{DensityField, DiskModel, FieldGrid, G};
use crate::error::{invalid, Result};
use crate::polar_kernels::{PolarKernel, PolarKernelTables, PotentialKernel, PotentialTables};

/// Sign of the reported force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// Kernel sums exactly as written: the attractive force, `-∇Φ` for `Φ = -G∫Σ/|x - x̄|`.
    #[default]
    PaperLiteral,
    /// `+∇Φ`, the exact negation.
    PotentialGradient,
}

impl SignConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::PaperLiteral => "paper-literal",
            Self::PotentialGradient => "potential-gradient",
        }
    }

    fn factor(self) -> f64 {
        match self {
            Self::PaperLiteral => 1.0,
            Self::PotentialGradient => -1.0,
        }
    }
}

/// Force components at cell centers: `(F_x, F_y)` or `(F_r, F_θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceField {
    grid: FieldGrid,
    components: [Array2<f64>; 2],
    convention: SignConvention,
}

impl ForceField {
    pub fn new(grid: FieldGrid, components: [Array2<f64>; 2], convention: SignConvention) -> Result<Self> {
        let n = grid.n();
        if components.iter().any(|c| c.dim() != (n, n)) {
            return invalid(format!("force components must be {n}×{n}"));
        }
        Ok(Self { grid, components, convention })
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn components(&self) -> &[Array2<f64>; 2] {
        &self.components
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    pub fn is_polar(&self) -> bool {
        matches!(self.grid, FieldGrid::Polar(_))
    }

    pub fn component_names(&self) -> [&'static str; 2] {
        if self.is_polar() {
            ["r", "theta"]
        } else {
            ["x", "y"]
        }
    }

    /// The same field expressed in another sign convention.
    pub fn with_convention(mut self, convention: SignConvention) -> Self {
        if convention != self.convention {
            for c in &mut self.components {
                c.mapv_inplace(|v| -v);
            }
            self.convention = convention;
        }
        self
    }

    /// Radial component: `(x F_x + y F_y) / R` on Cartesian grids, zero at `R = 0`.
    pub fn radial(&self) -> Array2<f64> {
        match &self.grid {
            FieldGrid::Polar(_) => self.components[0].clone(),
            FieldGrid::Cartesian(g) => {
                let c = g.centers();
                Array2::from_shape_fn(self.components[0].dim(), |(i, j)| {
                    let (x, y) = (c[i], c[j]);
                    let r = x.hypot(y);
                    if r == 0.0 {
                        0.0
                    } else {
                        (x * self.components[0][[i, j]] + y * self.components[1][[i, j]]) / r
                    }
                })
            }
        }
    }
}

fn cartesian_grid_check(field: &DensityField, tables: &KernelTables) -> Result<()> {
    match field.grid() {
        FieldGrid::Cartesian(g) if g == tables.grid() => Ok(()),
        _ => invalid("density field and kernel tables are on different grids"),
    }
}

const X_FAMILY: [CartesianKernel; 3] = [CartesianKernel::X0, CartesianKernel::XX, CartesianKernel::XY];
const Y_FAMILY: [CartesianKernel; 3] = [CartesianKernel::Y0, CartesianKernel::YX, CartesianKernel::YY];

/// Cartesian force by zero-padded FFT convolution.
pub fn solve_cartesian(field: &DensityField, tables: &KernelTables) -> Result<ForceField> {
    solve_cartesian_with(field, tables, SignConvention::default())
}

pub fn solve_cartesian_with(field: &DensityField, tables: &KernelTables, convention: SignConvention) -> Result<ForceField> {
    cartesian_grid_check(field, tables)?;
    let (conv, spectra) = tables.spectra();
    let (dx, dy) = field.slopes();
    let data: Vec<PaddedSpectrum> = [field.values(), dx, dy]
        .iter()
        .map(|a| conv.field_spectrum(a.view()))
        .collect::<Result<_>>()?;
    let component = |family: [CartesianKernel; 3]| -> Result<Array2<f64>> {
        let terms: Vec<_> = family.iter().zip(&data).map(|(k, d)| (&spectra[k.index()], d)).collect();
        Ok(conv.convolve_sum(&terms)? * convention.factor())
    };
    let (fx, fy) = rayon::join(|| component(X_FAMILY), || component(Y_FAMILY));
    ForceField::new(field.grid().clone(), [fx?, fy?], convention)
}

/// Cartesian force by the literal `O(N⁴)` double sum over tabulated kernels.
pub fn solve_cartesian_direct(field: &DensityField, tables: &KernelTables) -> Result<ForceField> {
    cartesian_grid_check(field, tables)?;
    let (dx, dy) = field.slopes();
    let inputs = [field.values(), dx, dy];
    let component = |family: [CartesianKernel; 3]| {
        family.iter().zip(inputs.iter()).fold(None::<Array2<f64>>, |acc, (k, f)| {
            let term = direct_convolve_table(tables.table(*k), f.view(), Layout::Aperiodic);
            Some(match acc {
                None => term,
                Some(a) => a + term,
            })
        })
    };
    let fx = component(X_FAMILY).expect("three terms");
    let fy = component(Y_FAMILY).expect("three terms");
    ForceField::new(field.grid().clone(), [fx, fy], SignConvention::PaperLiteral)
}

struct PolarInputs<'a> {
    values: ArrayView2<'a, f64>,
    dr: ArrayView2<'a, f64>,
    dt: ArrayView2<'a, f64>,
    ring: [Vec<f64>; 3],
    radii: &'a [f64],
}

fn polar_inputs<'a>(field: &'a DensityField, grid: &crate::grid::PolarGrid, radii: &'a [f64]) -> Result<PolarInputs<'a>> {
    match field.grid() {
        FieldGrid::Polar(g) if g == grid => {}
        _ => return invalid("density field and kernel tables are on different grids"),
    }
    let hole = field.hole().ok_or_else(|| crate::Error::InvalidArgument("polar field without hole ring".into()))?;
    let (dr, dt) = field.slopes();
    Ok(PolarInputs {
        values: field.values().view(),
        dr: dr.view(),
        dt: dt.view(),
        ring: [hole.values.to_vec(), hole.radial_slopes.to_vec(), hole.angular_slopes.to_vec()],
        radii,
    })
}

/// `Σ K0⊛σ + r_i Σ Kr⊛δr + Σ Kθ⊛δθ` plus the hole-ring terms, by FFT.
fn polar_sum(
    conv: &Convolver,
    regular: [&PaddedSpectrum; 3],
    hole: [&Array2<Complex64>; 3],
    data: &[PaddedSpectrum; 3],
    inp: &PolarInputs,
) -> Result<Array2<f64>> {
    let plain = conv.convolve_sum(&[(regular[0], &data[0]), (regular[2], &data[2])])?;
    let scaled = conv.convolve_sum(&[(regular[1], &data[1])])?;
    let ring_plain = conv.ring_convolve_sum(&[(hole[0], &inp.ring[0]), (hole[2], &inp.ring[2])])?;
    let ring_scaled = conv.ring_convolve_sum(&[(hole[1], &inp.ring[1])])?;
    let mut out = plain + ring_plain;
    Zip::indexed(&mut out).and(&scaled).and(&ring_scaled).for_each(|(i, _), o, &a, &b| {
        *o += inp.radii[i] * (a + b);
    });
    Ok(out)
}

/// Polar force by FFT convolution along radius and angle plus hole-ring sums.
pub fn solve_polar(field: &DensityField, tables: &PolarKernelTables) -> Result<ForceField> {
    solve_polar_with(field, tables, SignConvention::default())
}

pub fn solve_polar_with(field: &DensityField, tables: &PolarKernelTables, convention: SignConvention) -> Result<ForceField> {
    let grid = tables.grid();
    let inp = polar_inputs(field, grid, grid.radial_centers())?;
    let (conv, regular, hole) = tables.spectra();
    let data = [
        conv.field_spectrum(inp.values)?,
        conv.field_spectrum(inp.dr)?,
        conv.field_spectrum(inp.dt)?,
    ];
    let pick = |ks: [PolarKernel; 3]| {
        (
            [&regular[ks[0].index()], &regular[ks[1].index()], &regular[ks[2].index()]],
            [&hole[ks[0].index()], &hole[ks[1].index()], &hole[ks[2].index()]],
        )
    };
    let (rr, rh) = pick([PolarKernel::R0, PolarKernel::RR, PolarKernel::RTheta]);
    let (tr, th) = pick([PolarKernel::Theta0, PolarKernel::ThetaR, PolarKernel::ThetaTheta]);
    let (fr, ft) = rayon::join(
        || polar_sum(conv, rr, rh, &data, &inp),
        || polar_sum(conv, tr, th, &data, &inp),
    );
    let s = convention.factor();
    ForceField::new(field.grid().clone(), [fr? * -s, ft? * s], convention)
}

fn direct_polar_sum(regular: [&Array2<f64>; 3], hole: [&Array2<f64>; 3], inp: &PolarInputs) -> Array2<f64> {
    let fields = [inp.values, inp.dr, inp.dt];
    let terms: Vec<Array2<f64>> = regular
        .iter()
        .zip(fields.iter())
        .map(|(k, f)| direct_convolve_table(k, *f, Layout::RadialPadded))
        .collect();
    let n = inp.radii.len();
    let ring = |k: &Array2<f64>, r: &[f64]| {
        Array2::from_shape_fn((n, n), |(i, j)| (0..n).map(|jp| k[[i, (j + n - jp) % n]] * r[jp]).sum::<f64>())
    };
    let rings: Vec<Array2<f64>> = hole.iter().zip(inp.ring.iter()).map(|(k, r)| ring(k, r)).collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        terms[0][[i, j]] + terms[2][[i, j]] + rings[0][[i, j]] + rings[2][[i, j]]
            + inp.radii[i] * (terms[1][[i, j]] + rings[1][[i, j]])
    })
}

/// Polar force by literal double sums over the tabulated kernels.
pub fn solve_polar_direct(field: &DensityField, tables: &PolarKernelTables) -> Result<ForceField> {
    let grid = tables.grid();
    let inp = polar_inputs(field, grid, grid.radial_centers())?;
    let t = |k: PolarKernel| tables.table(k);
    let h = |k: PolarKernel| tables.hole_table(k);
    let fr = direct_polar_sum(
        [t(PolarKernel::R0), t(PolarKernel::RR), t(PolarKernel::RTheta)],
        [h(PolarKernel::R0), h(PolarKernel::RR), h(PolarKernel::RTheta)],
        &inp,
    );
    let ft = direct_polar_sum(
        [t(PolarKernel::Theta0), t(PolarKernel::ThetaR), t(PolarKernel::ThetaTheta)],
        [h(PolarKernel::Theta0), h(PolarKernel::ThetaR), h(PolarKernel::ThetaTheta)],
        &inp,
    );
    ForceField::new(field.grid().clone(), [-fr, ft], SignConvention::PaperLiteral)
}

/// Potential at the polar cell centers, from the same density expansion.
pub fn solve_polar_potential(field: &DensityField, tables: &PotentialTables) -> Result<Array2<f64>> {
    let grid = tables.grid();
    let inp = polar_inputs(field, grid, grid.radial_centers())?;
    let (conv, regular, hole) = tables.spectra();
    let data = [
        conv.field_spectrum(inp.values)?,
        conv.field_spectrum(inp.dr)?,
        conv.field_spectrum(inp.dt)?,
    ];
    let idx = |k: PotentialKernel| k as usize;
    let ks = PotentialKernel::ALL;
    let mut phi = polar_sum(
        conv,
        [&regular[idx(ks[0])], &regular[idx(ks[1])], &regular[idx(ks[2])]],
        [&hole[idx(ks[0])], &hole[idx(ks[1])], &hole[idx(ks[2])]],
        &data,
        &inp,
    )?;
    for (i, mut row) in phi.rows_mut().into_iter().enumerate() {
        let r = inp.radii[i];
        row.mapv_inplace(|v| -G * r * v);
    }
    Ok(phi)
}

/// Closed-form force of `model` sampled at the cell centers, if it has one.
pub fn exact_force_field(model: &DiskModel, grid: &FieldGrid, convention: SignConvention) -> Option<ForceField> {
    let n = grid.n();
    let s = convention.factor();
    let (a, b) = match grid {
        FieldGrid::Cartesian(g) => {
            let c = g.centers();
            let f = Array2::from_shape_fn((n, n), |(i, j)| model.exact_force(c[i], c[j]));
            if f.iter().any(|v| v.is_none()) {
                return None;
            }
            (f.mapv(|v| v.unwrap().0 * s), f.mapv(|v| v.unwrap().1 * s))
        }
        FieldGrid::Polar(g) => {
            let (rc, tc) = (g.radial_centers(), g.angular_centers());
            let f = Array2::from_shape_fn((n, n), |(i, j)| {
                let (st, ct) = tc[j].sin_cos();
                model
                    .exact_force(rc[i] * ct, rc[i] * st)
                    .map(|(fx, fy)| (fx * ct + fy * st, fy * ct - fx * st))
            });
            if f.iter().any(|v| v.is_none()) {
                return None;
            }
            (f.mapv(|v| v.unwrap().0 * s), f.mapv(|v| v.unwrap().1 * s))
        }
    };
    ForceField::new(grid.clone(), [a, b], convention).ok()
}
