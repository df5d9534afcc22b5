//! Kernels on the logarithmic polar grid.
//!
//! All kernels are dimensionless: radii enter through `t = r̄ / r_i` and
//! angles through `φ = θ̄ - θ_j`. Radial integrals are exact; the angular
//! integral uses one two-node trapezoid per cell, except for the azimuthal
//! zero and radial-slope kernels, which are exact in both directions.

use std::sync::OnceLock;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::convolve::{layout_kernel, wrap_offset, Convolver, Layout, PaddedSpectrum};
use crate::error::{Error, Result};
use crate::grid::PolarGrid;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarKernel {
    R0,
    RR,
    RTheta,
    Theta0,
    ThetaR,
    ThetaTheta,
}

impl PolarKernel {
    pub const ALL: [PolarKernel; 6] =
        [Self::R0, Self::RR, Self::RTheta, Self::Theta0, Self::ThetaR, Self::ThetaTheta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::R0 => "r0",
            Self::RR => "rr",
            Self::RTheta => "rtheta",
            Self::Theta0 => "theta0",
            Self::ThetaR => "thetar",
            Self::ThetaTheta => "thetatheta",
        }
    }

    pub fn is_azimuthal(self) -> bool {
        matches!(self, Self::Theta0 | Self::ThetaR | Self::ThetaTheta)
    }
}

/// Kernels of the potential (rather than the force) on the polar grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialKernel {
    Zero,
    Radial,
    Angular,
}

impl PotentialKernel {
    pub const ALL: [PotentialKernel; 3] = [Self::Zero, Self::Radial, Self::Angular];
}

/// Which antiderivatives the azimuthal kernels use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AzimuthalForm {
    /// Antiderivatives re-derived from the defining integrals.
    Derived,
    /// The closed forms as printed in the method's original description.
    Printed,
}

/// `F(r̃, θ) = √(1 + r̃² - 2 r̃ cos θ)`.
pub fn eval_f(rt: f64, theta: f64) -> f64 {
    let node = Node::new(theta);
    (rt - node.c).hypot(node.s)
}

/// Radial antiderivative of `t (1 - t cos θ) / F³`.
pub fn eval_h1(rt: f64, theta: f64) -> Result<f64> {
    h1(rt, &Node::new(theta))
}

/// Radial antiderivative of `t² (1 - t cos θ) / F³`.
pub fn eval_h2(rt: f64, theta: f64) -> Result<f64> {
    h2(rt, &Node::new(theta))
}

#[derive(Debug, Clone, Copy)]
struct Node {
    phi: f64,
    c: f64,
    s: f64,
    s2: f64,
}

impl Node {
    fn new(phi: f64) -> Self {
        // from |φ| so that mirrored nodes share their cosine bit for bit
        let (s, c) = phi.abs().sin_cos();
        let s = s.copysign(phi);
        Self { phi, c, s, s2: s * s }
    }
}

/// `(ln(t - cos φ + F), F)`, stable when `t < cos φ`.
fn log_l(t: f64, n: &Node) -> Result<(f64, f64)> {
    let u = t - n.c;
    let f = u.hypot(n.s);
    if u >= 0.0 {
        if f == 0.0 {
            return Err(Error::SingularEvaluation(format!("F vanishes at t = {t}, φ = {}", n.phi)));
        }
        return Ok(((u + f).ln(), f));
    }
    if n.s2 == 0.0 {
        return Err(Error::SingularEvaluation(format!(
            "logarithm argument vanishes at t = {t}, φ = {}",
            n.phi
        )));
    }
    Ok(((n.s2 / (f - u)).ln(), f))
}

fn h1(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    Ok(-n.c * l + (2.0 * n.c * t - 1.0) / f)
}

fn h2(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    let c = n.c;
    Ok(-((3.0 * c * c - 1.0) * l + (-6.0 * t * c * c + 3.0 * c + t * t * c + t) / f))
}

/// `∫ t / F dt`.
fn p0(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    Ok(f + n.c * l)
}

/// `∫ t² / F dt`.
fn p1(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    let c = n.c;
    Ok(0.5 * (t + 3.0 * c) * f + 0.5 * (3.0 * c * c - 1.0) * l)
}

/// `∫ t² / F³ dt` between `t0` and `t1`.
fn inverse_cube_moment(t0: f64, t1: f64, n: &Node) -> Result<f64> {
    let c = n.c;
    if n.s2 < 1e-6 && c < 0.0 {
        // near φ = π the closed form cancels badly, while the integrand is smooth
        let g = |t: f64| {
            let f2 = (t - c) * (t - c) + n.s2;
            t * t / (f2 * f2.sqrt())
        };
        return Ok(quadrature::integrate(g, t0, t1, 1e-15, 1e-14));
    }
    let q = |t: f64| -> Result<f64> {
        let (l, f) = log_l(t, n)?;
        Ok(l + ((2.0 * c * c - 1.0) * t - c) / (n.s2 * f))
    };
    Ok(q(t1)? - q(t0)?)
}

fn printed_theta0(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    Ok(-(f + t * l))
}

fn printed_thetar(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    let c = n.c;
    Ok(-(-1.0 + 0.5 * t + 1.5 * c) * f - (1.5 * c * c - 0.5 - c) * l)
}

fn printed_thetatheta(t: f64, n: &Node) -> Result<f64> {
    let (l, f) = log_l(t, n)?;
    let _ = f;
    let (c, s) = (n.c, n.s);
    Ok((s * (t - 2.0 * c * c * t + c) + (c * c - s) * l) / (-1.0 + c * c))
}

/// Source-cell limits relative to the field point.
#[derive(Debug, Clone, Copy)]
pub struct CellLimits {
    /// Inner radial limit over `r_i`.
    pub t0: f64,
    /// Outer radial limit over `r_i`.
    pub t1: f64,
    /// Source-cell center radius over `r_i`.
    pub tc: f64,
    /// Lower angular limit `θ_{j'-1/2} - θ_j`.
    pub phi0: f64,
    /// Upper angular limit `θ_{j'+1/2} - θ_j`.
    pub phi1: f64,
}

impl CellLimits {
    fn width(&self) -> f64 {
        self.phi1 - self.phi0
    }

    fn mid(&self) -> f64 {
        0.5 * (self.phi0 + self.phi1)
    }
}

/// Symmetric representative of an angular offset: `(-N/2, N/2]`.
fn reduce_angular(dj: i64, n: usize) -> i64 {
    let n = n as i64;
    let d = dj.rem_euclid(n);
    if 2 * d > n {
        d - n
    } else {
        d
    }
}

fn angular_limits(dj: i64, grid: &PolarGrid) -> (f64, f64) {
    let d = reduce_angular(dj, grid.n()) as f64;
    let h = grid.dtheta();
    ((-d - 0.5) * h, (-d + 0.5) * h)
}

/// Limits for a regular source cell at offset `(di, dj)`.
pub fn regular_limits(di: i64, dj: i64, grid: &PolarGrid) -> CellLimits {
    let (phi0, phi1) = angular_limits(dj, grid);
    CellLimits {
        t0: grid.inner_ratio(di),
        t1: grid.outer_ratio(di),
        tc: grid.beta().powi(di as i32),
        phi0,
        phi1,
    }
}

/// Limits for the hole cell at angular offset `dj`, seen from radial row `i`.
pub fn hole_limits(i: usize, dj: i64, grid: &PolarGrid) -> CellLimits {
    let (phi0, phi1) = angular_limits(dj, grid);
    let r = grid.radial_centers()[i];
    CellLimits { t0: 0.0, t1: grid.hole_radius() / r, tc: grid.hole_center() / r, phi0, phi1 }
}

/// Two-node trapezoid in φ of `weight(φ) · g(φ)`.
fn trapezoid(lim: &CellLimits, weighted: bool, g: impl Fn(&Node) -> Result<f64>) -> Result<f64> {
    let (a, b) = (Node::new(lim.phi0), Node::new(lim.phi1));
    let (wa, wb) = if weighted {
        let m = lim.mid();
        (lim.phi0 - m, lim.phi1 - m)
    } else {
        (1.0, 1.0)
    };
    Ok(0.5 * (wb * g(&b)? + wa * g(&a)?) * lim.width())
}

/// Trapezoid with the printed angular weight `φ` instead of the offset from the cell center.
fn printed_trapezoid(lim: &CellLimits, g: impl Fn(&Node) -> Result<f64>) -> Result<f64> {
    let (a, b) = (Node::new(lim.phi0), Node::new(lim.phi1));
    Ok(0.5 * (lim.phi1 * g(&b)? + lim.phi0 * g(&a)?) * lim.width())
}

fn double_difference(lim: &CellLimits, g: impl Fn(f64, &Node) -> Result<f64>) -> Result<f64> {
    let (a, b) = (Node::new(lim.phi0), Node::new(lim.phi1));
    Ok((g(lim.t1, &b)? - g(lim.t1, &a)?) - (g(lim.t0, &b)? - g(lim.t0, &a)?))
}

fn radial_difference(lim: &CellLimits, g: impl Fn(f64, &Node) -> Result<f64>) -> impl Fn(&Node) -> Result<f64> {
    let (t0, t1) = (lim.t0, lim.t1);
    move |n| Ok(g(t1, n)? - g(t0, n)?)
}

/// Evaluates one force kernel over a source cell.
pub fn kernel_on_cell(kind: PolarKernel, lim: &CellLimits, form: AzimuthalForm) -> Result<f64> {
    if form == AzimuthalForm::Printed && kind.is_azimuthal() {
        return printed_kernel_on_cell(kind, lim);
    }
    match kind {
        PolarKernel::R0 => trapezoid(lim, false, radial_difference(lim, h1)),
        PolarKernel::RR => {
            let k0 = trapezoid(lim, false, radial_difference(lim, h1))?;
            Ok(trapezoid(lim, false, radial_difference(lim, h2))? - lim.tc * k0)
        }
        PolarKernel::RTheta => trapezoid(lim, true, radial_difference(lim, h1)),
        PolarKernel::Theta0 => double_difference(lim, |t, n| Ok(-p0(t, n)?)),
        PolarKernel::ThetaR => {
            let k0 = double_difference(lim, |t, n| Ok(-p0(t, n)?))?;
            Ok(double_difference(lim, |t, n| Ok(-p1(t, n)?))? - lim.tc * k0)
        }
        PolarKernel::ThetaTheta => {
            trapezoid(lim, true, |n| Ok(n.s * inverse_cube_moment(lim.t0, lim.t1, n)?))
        }
    }
}

fn printed_kernel_on_cell(kind: PolarKernel, lim: &CellLimits) -> Result<f64> {
    match kind {
        PolarKernel::Theta0 => double_difference(lim, printed_theta0),
        PolarKernel::ThetaR => double_difference(lim, printed_thetar),
        PolarKernel::ThetaTheta => printed_trapezoid(lim, radial_difference(lim, printed_thetatheta)),
        _ => unreachable!("printed forms exist only for azimuthal kernels"),
    }
}

/// Evaluates one potential kernel over a source cell.
pub fn potential_kernel_on_cell(kind: PotentialKernel, lim: &CellLimits) -> Result<f64> {
    match kind {
        PotentialKernel::Zero => trapezoid(lim, false, radial_difference(lim, p0)),
        PotentialKernel::Radial => {
            let k0 = trapezoid(lim, false, radial_difference(lim, p0))?;
            Ok(trapezoid(lim, false, radial_difference(lim, p1))? - lim.tc * k0)
        }
        PotentialKernel::Angular => trapezoid(lim, true, radial_difference(lim, p0)),
    }
}

/// Force kernel for offset `(di, dj) = (i - i', j - j')`, with `|di| < N`.
pub fn eval_polar_kernel(kind: PolarKernel, di: i64, dj: i64, grid: &PolarGrid) -> Result<f64> {
    eval_polar_kernel_with(kind, di, dj, grid, AzimuthalForm::Derived)
}

pub fn eval_polar_kernel_with(kind: PolarKernel, di: i64, dj: i64, grid: &PolarGrid, form: AzimuthalForm) -> Result<f64> {
    check_radial_offset(di, grid)?;
    kernel_on_cell(kind, &regular_limits(di, dj, grid), form)
}

/// Kernel of the hole cell at angular offset `dj` seen from radial row `i` (0-based).
pub fn eval_hole_kernel(kind: PolarKernel, i: usize, dj: i64, grid: &PolarGrid) -> Result<f64> {
    check_row(i, grid)?;
    kernel_on_cell(kind, &hole_limits(i, dj, grid), AzimuthalForm::Derived)
}

pub fn eval_potential_kernel(kind: PotentialKernel, di: i64, dj: i64, grid: &PolarGrid) -> Result<f64> {
    check_radial_offset(di, grid)?;
    potential_kernel_on_cell(kind, &regular_limits(di, dj, grid))
}

pub fn eval_hole_potential_kernel(kind: PotentialKernel, i: usize, dj: i64, grid: &PolarGrid) -> Result<f64> {
    check_row(i, grid)?;
    potential_kernel_on_cell(kind, &hole_limits(i, dj, grid))
}

fn check_radial_offset(di: i64, grid: &PolarGrid) -> Result<()> {
    let n = grid.n() as i64;
    if di.abs() >= n {
        return Err(Error::InvalidArgument(format!("radial offset {di} outside [-{}, {}]", n - 1, n - 1)));
    }
    Ok(())
}

fn check_row(i: usize, grid: &PolarGrid) -> Result<()> {
    if i >= grid.n() {
        return Err(Error::InvalidArgument(format!("radial row {i} outside [0, {})", grid.n())));
    }
    Ok(())
}

/// Integrand of a force kernel in `(t, φ)`, including its slope weight.
pub fn kernel_integrand(kind: PolarKernel, lim: &CellLimits, t: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let f2 = 1.0 + t * t - 2.0 * t * c;
    let f3 = f2 * f2.sqrt();
    let radial = t * (1.0 - t * c) / f3;
    let azimuthal = t * t * s / f3;
    match kind {
        PolarKernel::R0 => radial,
        PolarKernel::RR => radial * (t - lim.tc),
        PolarKernel::RTheta => radial * (phi - lim.mid()),
        PolarKernel::Theta0 => azimuthal,
        PolarKernel::ThetaR => azimuthal * (t - lim.tc),
        PolarKernel::ThetaTheta => azimuthal * (phi - lim.mid()),
    }
}

/// Adaptive quadrature of the defining double integral over a source cell.
pub fn kernel_quadrature(kind: PolarKernel, lim: &CellLimits) -> f64 {
    quadrature::integrate_2d(
        |phi, t| kernel_integrand(kind, lim, t, phi),
        (lim.phi0, lim.phi1),
        (lim.t0, lim.t1),
        1e-14,
        1e-11,
    )
}

/// Offsets at which the azimuthal closed forms are checked against quadrature.
const GATE_OFFSETS: [(i64, i64); 3] = [(1, 5), (-2, 4), (3, -6)];

/// Relative deviation allowed by the gate; the trapezoid kernel errs by a few percent here.
const GATE_TOLERANCE: f64 = 0.1;

/// Largest relative deviation of a form from quadrature on the gate offsets.
pub fn azimuthal_deviation(kind: PolarKernel, form: AzimuthalForm, grid: &PolarGrid) -> f64 {
    GATE_OFFSETS
        .iter()
        .map(|&(di, dj)| {
            let lim = regular_limits(di, dj, grid);
            let want = kernel_quadrature(kind, &lim);
            match kernel_on_cell(kind, &lim, form) {
                Ok(v) => (v - want).abs() / want.abs().max(1e-300),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

/// Chooses, per azimuthal kernel, the printed form if it passes the quadrature
/// check and the derived form otherwise.
pub fn select_azimuthal_forms(grid: &PolarGrid) -> [AzimuthalForm; 3] {
    let pick = |kind| {
        if azimuthal_deviation(kind, AzimuthalForm::Printed, grid) <= GATE_TOLERANCE {
            AzimuthalForm::Printed
        } else {
            AzimuthalForm::Derived
        }
    };
    [pick(PolarKernel::Theta0), pick(PolarKernel::ThetaR), pick(PolarKernel::ThetaTheta)]
}

fn form_for(kind: PolarKernel, forms: &[AzimuthalForm; 3]) -> AzimuthalForm {
    match kind {
        PolarKernel::Theta0 => forms[0],
        PolarKernel::ThetaR => forms[1],
        PolarKernel::ThetaTheta => forms[2],
        _ => AzimuthalForm::Derived,
    }
}

fn tabulate_regular(grid: &PolarGrid, value: impl Fn(i64, i64) -> Result<f64> + Sync) -> Array2<f64> {
    let n = grid.n() as i64;
    layout_kernel(grid.n(), Layout::RadialPadded, |di, dj| {
        if di.abs() >= n {
            0.0
        } else {
            value(di, dj).expect("polar kernel nodes avoid the singular point")
        }
    })
}

fn tabulate_hole(grid: &PolarGrid, value: impl Fn(usize, i64) -> Result<f64> + Sync) -> Array2<f64> {
    let n = grid.n();
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, line)| {
        for (dj, v) in line.iter_mut().enumerate() {
            *v = value(i, dj as i64).expect("polar kernel nodes avoid the singular point");
        }
    });
    Array2::from_shape_vec((n, n), data).expect("shape")
}

struct PolarSpectra {
    convolver: Convolver,
    regular: Vec<PaddedSpectrum>,
    hole: Vec<Array2<Complex64>>,
}

/// Tabulated polar kernels: regular tables over `(di mod 2N, dj mod N)` and
/// hole tables over `(i, dj mod N)`.
pub struct PolarKernelTables {
    grid: PolarGrid,
    forms: [AzimuthalForm; 3],
    regular: Vec<Array2<f64>>,
    hole: Vec<Array2<f64>>,
    spectra: OnceLock<PolarSpectra>,
}

impl std::fmt::Debug for PolarKernelTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarKernelTables")
            .field("n", &self.grid.n())
            .field("forms", &self.forms)
            .finish()
    }
}

impl PolarKernelTables {
    /// Tabulates with the azimuthal forms chosen by the quadrature check.
    pub fn tabulate(grid: &PolarGrid) -> Self {
        Self::tabulate_with(grid, select_azimuthal_forms(grid))
    }

    pub fn tabulate_with(grid: &PolarGrid, forms: [AzimuthalForm; 3]) -> Self {
        let regular = PolarKernel::ALL
            .iter()
            .map(|&k| {
                let form = form_for(k, &forms);
                tabulate_regular(grid, |di, dj| eval_polar_kernel_with(k, di, dj, grid, form))
            })
            .collect();
        let hole = PolarKernel::ALL
            .iter()
            .map(|&k| tabulate_hole(grid, |i, dj| eval_hole_kernel(k, i, dj, grid)))
            .collect();
        Self { grid: grid.clone(), forms, regular, hole, spectra: OnceLock::new() }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    /// Forms in use for the `θ0`, `θr` and `θθ` kernels.
    pub fn azimuthal_forms(&self) -> [AzimuthalForm; 3] {
        self.forms
    }

    /// Padded `2N × N` table.
    pub fn table(&self, kind: PolarKernel) -> &Array2<f64> {
        &self.regular[kind.index()]
    }

    /// `N × N` hole table indexed `[i, dj]`.
    pub fn hole_table(&self, kind: PolarKernel) -> &Array2<f64> {
        &self.hole[kind.index()]
    }

    pub fn get(&self, kind: PolarKernel, di: i64, dj: i64) -> f64 {
        let n = self.grid.n();
        self.regular[kind.index()][[wrap_offset(di, 2 * n), wrap_offset(dj, n)]]
    }

    pub fn get_hole(&self, kind: PolarKernel, i: usize, dj: i64) -> f64 {
        self.hole[kind.index()][[i, wrap_offset(dj, self.grid.n())]]
    }

    pub(crate) fn spectra(&self) -> (&Convolver, &[PaddedSpectrum], &[Array2<Complex64>]) {
        let s = self.spectra.get_or_init(|| build_spectra(&self.grid, &self.regular, &self.hole));
        (&s.convolver, &s.regular, &s.hole)
    }

    /// Forces the FFT of every table.
    pub fn prepare(&self) {
        let _ = self.spectra();
    }

    pub(crate) fn from_raw(grid: PolarGrid, forms: [AzimuthalForm; 3], regular: Vec<Array2<f64>>, hole: Vec<Array2<f64>>) -> Result<Self> {
        let n = grid.n();
        if regular.len() != 6 || hole.len() != 6 || regular.iter().any(|t| t.dim() != (2 * n, n)) || hole.iter().any(|t| t.dim() != (n, n)) {
            return Err(Error::InvalidArgument("polar kernel cache has the wrong shape".into()));
        }
        Ok(Self { grid, forms, regular, hole, spectra: OnceLock::new() })
    }

    pub(crate) fn raw(&self) -> (&[Array2<f64>], &[Array2<f64>]) {
        (&self.regular, &self.hole)
    }
}

fn build_spectra(grid: &PolarGrid, regular: &[Array2<f64>], hole: &[Array2<f64>]) -> PolarSpectra {
    let convolver = Convolver::new(grid.n(), Layout::RadialPadded).expect("valid size");
    let regular = regular.iter().map(|t| convolver.kernel_spectrum(t).expect("shape")).collect();
    let hole = hole.iter().map(|t| convolver.ring_kernel_spectra(t).expect("shape")).collect();
    PolarSpectra { convolver, regular, hole }
}

/// Tabulates all six polar force kernels and their hole counterparts.
pub fn tabulate_polar_kernels(grid: &PolarGrid) -> PolarKernelTables {
    PolarKernelTables::tabulate(grid)
}

/// Tabulated potential kernels on the polar grid.
pub struct PotentialTables {
    grid: PolarGrid,
    regular: Vec<Array2<f64>>,
    hole: Vec<Array2<f64>>,
    spectra: OnceLock<PolarSpectra>,
}

impl PotentialTables {
    pub fn tabulate(grid: &PolarGrid) -> Self {
        let regular = PotentialKernel::ALL
            .iter()
            .map(|&k| tabulate_regular(grid, |di, dj| eval_potential_kernel(k, di, dj, grid)))
            .collect();
        let hole = PotentialKernel::ALL
            .iter()
            .map(|&k| tabulate_hole(grid, |i, dj| eval_hole_potential_kernel(k, i, dj, grid)))
            .collect();
        Self { grid: grid.clone(), regular, hole, spectra: OnceLock::new() }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn table(&self, kind: PotentialKernel) -> &Array2<f64> {
        &self.regular[kind as usize]
    }

    pub fn hole_table(&self, kind: PotentialKernel) -> &Array2<f64> {
        &self.hole[kind as usize]
    }

    pub(crate) fn spectra(&self) -> (&Convolver, &[PaddedSpectrum], &[Array2<Complex64>]) {
        let s = self.spectra.get_or_init(|| build_spectra(&self.grid, &self.regular, &self.hole));
        (&s.convolver, &s.regular, &s.hole)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn f_values() {
        assert_eq!(eval_f(1.0, 0.0), 0.0);
        assert_eq!(eval_f(0.0, 1.3), 1.0);
        assert!((eval_f(2.0, PI) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn h_derivatives_match_integrands() {
        let (t, th): (f64, f64) = (0.5, 1.0);
        let h = 1e-5;
        let f3 = (1.0 + t * t - 2.0 * t * th.cos()).powf(1.5);
        let d1 = (eval_h1(t + h, th).unwrap() - eval_h1(t - h, th).unwrap()) / (2.0 * h);
        assert!((d1 - t * (1.0 - t * th.cos()) / f3).abs() < 1e-6);
        let d2 = (eval_h2(t + h, th).unwrap() - eval_h2(t - h, th).unwrap()) / (2.0 * h);
        assert!((d2 - t * t * (1.0 - t * th.cos()) / f3).abs() < 1e-6);
    }

    #[test]
    fn h1_is_even_in_angle() {
        for (t, th) in [(0.3, 0.2), (1.7, 2.5), (1.0, 0.01)] {
            assert_eq!(eval_h1(t, th).unwrap(), eval_h1(t, -th).unwrap());
        }
    }

    #[test]
    fn singular_point_is_reported() {
        assert!(matches!(eval_h1(1.0, 0.0), Err(Error::SingularEvaluation(_))));
        assert!(matches!(eval_h2(0.5, 0.0), Err(Error::SingularEvaluation(_))));
        assert!(eval_h1(1.5, 0.0).is_ok());
    }

    #[test]
    fn angular_reduction_is_symmetric() {
        assert_eq!(reduce_angular(3, 16), 3);
        assert_eq!(reduce_angular(13, 16), -3);
        assert_eq!(reduce_angular(8, 16), 8);
        assert_eq!(reduce_angular(-8, 16), 8);
        assert_eq!(reduce_angular(-3, 7), -3);
    }
}
