//! Cell-lumped point masses with a softened Newtonian kernel.

use ndarray::Array2;

use crate::convolve::{fft_convolve, layout_kernel, Convolver, Layout, PaddedSpectrum};
use crate::density::{uniform_gradient, DensityField, FieldGrid, G};
use crate::error::{invalid, Result};
use crate::grid::CartesianGrid;
use crate::solver::{ForceField, SignConvention};

/// How forces are obtained from the softened masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForceRoute {
    /// Second-order differences of the softened potential.
    #[default]
    DifferencedPotential,
    /// Direct sum of the analytic gradient of the softened kernel.
    KernelGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SofteningConfig {
    /// Softening length; `None` means one cell width.
    pub epsilon: Option<f64>,
    pub route: ForceRoute,
}

impl Default for SofteningConfig {
    fn default() -> Self {
        Self { epsilon: None, route: ForceRoute::DifferencedPotential }
    }
}

impl SofteningConfig {
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return invalid(format!("softening length must be positive, got {epsilon}"));
        }
        Ok(Self { epsilon: Some(epsilon), ..Self::default() })
    }

    fn resolve(&self, grid: &CartesianGrid) -> Result<f64> {
        match self.epsilon {
            None => Ok(grid.spacing()),
            Some(e) if e > 0.0 && e.is_finite() => Ok(e),
            Some(e) => invalid(format!("softening length must be positive, got {e}")),
        }
    }
}

fn cartesian(field: &DensityField) -> Result<&CartesianGrid> {
    match field.grid() {
        FieldGrid::Cartesian(g) => Ok(g),
        FieldGrid::Polar(_) => invalid("the softening baseline needs a Cartesian grid"),
    }
}

/// Spectrum of the softened potential kernel, reusable across fields on one grid.
pub struct SoftenedKernel {
    grid: CartesianGrid,
    epsilon: f64,
    convolver: Convolver,
    spectrum: PaddedSpectrum,
}

impl SoftenedKernel {
    pub fn new(grid: &CartesianGrid, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return invalid(format!("softening length must be non-negative, got {epsilon}"));
        }
        let dx = grid.spacing();
        let e2 = epsilon * epsilon;
        let kernel = layout_kernel(grid.n(), Layout::Aperiodic, |di, dj| {
            let (a, b) = (di as f64 * dx, dj as f64 * dx);
            let d2 = e2 + a * a + b * b;
            if d2 == 0.0 {
                0.0
            } else {
                -G / d2.sqrt()
            }
        });
        let convolver = Convolver::new(grid.n(), Layout::Aperiodic)?;
        let spectrum = convolver.kernel_spectrum(&kernel)?;
        Ok(Self { grid: grid.clone(), epsilon, convolver, spectrum })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Potential at cell centers from masses `Σ Δx²`.
    pub fn potential(&self, field: &DensityField) -> Result<Array2<f64>> {
        let grid = cartesian(field)?;
        if grid != &self.grid {
            return invalid("density grid does not match the softened kernel grid");
        }
        let masses = field.values() * grid.cell_area();
        self.convolver.convolve(&self.spectrum, masses.view())
    }

    /// Force as second-order differences of the potential.
    pub fn force(&self, field: &DensityField) -> Result<ForceField> {
        let phi = self.potential(field)?;
        let components = differenced_force(&phi, self.grid.spacing());
        ForceField::new(field.grid().clone(), components, SignConvention::PaperLiteral)
    }
}

/// Potential at cell centers from masses `Σ Δx²` and kernel `-G / √(ε² + d²)`.
pub fn softened_potential(field: &DensityField, epsilon: f64) -> Result<Array2<f64>> {
    SoftenedKernel::new(cartesian(field)?, epsilon)?.potential(field)
}

fn differenced_force(phi: &Array2<f64>, h: f64) -> [Array2<f64>; 2] {
    let n = phi.nrows();
    let mut fx = Array2::zeros((n, n));
    let mut fy = Array2::zeros((n, n));
    for j in 0..n {
        let col: Vec<f64> = phi.column(j).to_vec();
        for (i, v) in uniform_gradient(&col, h).into_iter().enumerate() {
            fx[[i, j]] = -v;
        }
    }
    for i in 0..n {
        let row: Vec<f64> = phi.row(i).to_vec();
        for (j, v) in uniform_gradient(&row, h).into_iter().enumerate() {
            fy[[i, j]] = -v;
        }
    }
    [fx, fy]
}

fn gradient_force(field: &DensityField, grid: &CartesianGrid, epsilon: f64) -> Result<[Array2<f64>; 2]> {
    let dx = grid.spacing();
    let e2 = epsilon * epsilon;
    let masses = field.values() * grid.cell_area();
    let component = |along_x: bool| {
        let kernel = layout_kernel(grid.n(), Layout::Aperiodic, |di, dj| {
            if di == 0 && dj == 0 {
                return 0.0;
            }
            let (a, b) = (di as f64 * dx, dj as f64 * dx);
            let d2 = e2 + a * a + b * b;
            let toward = if along_x { -a } else { -b };
            G * toward / (d2 * d2.sqrt())
        });
        fft_convolve(&kernel, masses.view(), Layout::Aperiodic)
    };
    Ok([component(true)?, component(false)?])
}

/// Softened-potential force on a Cartesian grid.
pub fn solve_softened_cartesian(field: &DensityField, cfg: &SofteningConfig) -> Result<ForceField> {
    let grid = cartesian(field)?;
    let epsilon = cfg.resolve(grid)?;
    let components = match cfg.route {
        ForceRoute::DifferencedPotential => {
            differenced_force(&softened_potential(field, epsilon)?, grid.spacing())
        }
        ForceRoute::KernelGradient => gradient_force(field, grid, epsilon)?,
    };
    ForceField::new(field.grid().clone(), components, SignConvention::PaperLiteral)
}

/// Unsoftened point-mass force, the `ε → 0` limit of the kernel-gradient route.
pub fn point_mass_force(field: &DensityField) -> Result<ForceField> {
    let grid = cartesian(field)?;
    let components = gradient_force(field, grid, 0.0)?;
    ForceField::new(field.grid().clone(), components, SignConvention::PaperLiteral)
}
