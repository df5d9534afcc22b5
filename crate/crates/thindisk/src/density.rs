//! Analytic disk models and sampling of densities onto grids.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};

use crate::error::{invalid, Error, Result};
use crate::grid::{CartesianGrid, PolarGrid};

/// Gravitational constant; the whole crate works in units where `G = 1`.
pub const G: f64 = 1.0;

/// Finite disk with `Σ = σ₀ (1 - R²/α²)^{3/2}` inside `R < α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2Disk {
    pub alpha: f64,
    pub sigma0: f64,
}

impl D2Disk {
    pub fn new(alpha: f64, sigma0: f64) -> Result<Self> {
        let d = Self { alpha, sigma0 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return invalid(format!("disk radius must be positive, got {}", self.alpha));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return invalid(format!("central density must be positive, got {}", self.sigma0));
        }
        Ok(())
    }

    pub fn density(&self, r: f64) -> f64 {
        if r >= self.alpha {
            return 0.0;
        }
        let q = 1.0 - (r / self.alpha).powi(2);
        self.sigma0 * q * q.sqrt()
    }

    /// dΣ/dR.
    pub fn density_slope(&self, r: f64) -> f64 {
        if r >= self.alpha {
            return 0.0;
        }
        let q = 1.0 - (r / self.alpha).powi(2);
        -3.0 * self.sigma0 * q.sqrt() * r / (self.alpha * self.alpha)
    }

    /// Radial force in the plane (negative means attraction).
    pub fn force(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return invalid(format!("radius must be non-negative, got {r}"));
        }
        let a = self.alpha;
        let k = self.sigma0 * G;
        if r <= a {
            return Ok(-3.0 * PI * PI * k * r * (4.0 * a * a - 3.0 * r * r) / (16.0 * a.powi(3)));
        }
        let q = a / r;
        let bracket = if q < FAR_FIELD {
            far_series(q, &FORCE_SERIES)
        } else {
            (4.0 * q * q - 3.0) * q.asin() - q * (2.0 * q * q - 3.0) * (1.0 - q * q).sqrt()
        };
        Ok(-(3.0 * PI * k / (8.0 * a.powi(3))) * r.powi(3) * bracket)
    }

    /// Potential on the disk plane, vanishing at infinity.
    pub fn potential(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return invalid(format!("radius must be non-negative, got {r}"));
        }
        let a = self.alpha;
        let k = self.sigma0 * G;
        let p = 8.0 * a.powi(4) - 8.0 * a * a * r * r + 3.0 * r.powi(4);
        if r <= a {
            return Ok(-3.0 * PI * PI * k * p / (64.0 * a.powi(3)));
        }
        let q = a / r;
        let bracket = if q < FAR_FIELD {
            far_series(q, &POTENTIAL_SERIES)
        } else {
            (3.0 - 8.0 * q * q + 8.0 * q.powi(4)) * q.asin() + 3.0 * q * (2.0 * q * q - 1.0) * (1.0 - q * q).sqrt()
        };
        Ok(-(3.0 * PI * k / (32.0 * a.powi(3))) * r.powi(4) * bracket)
    }

    pub fn mass(&self) -> f64 {
        2.0 * PI * self.sigma0 * self.alpha * self.alpha / 5.0
    }
}

// Far outside the disk the closed forms cancel down to O((α/R)⁵); these are the
// Taylor coefficients of the brackets in odd powers from 5 up.
const FAR_FIELD: f64 = 0.2;
const FORCE_SERIES: [f64; 9] = [
    16.0 / 15.0,
    8.0 / 35.0,
    2.0 / 21.0,
    5.0 / 99.0,
    35.0 / 1144.0,
    21.0 / 1040.0,
    77.0 / 5440.0,
    429.0 / 41344.0,
    2145.0 / 272384.0,
];
const POTENTIAL_SERIES: [f64; 8] = [
    64.0 / 15.0,
    32.0 / 105.0,
    8.0 / 105.0,
    20.0 / 693.0,
    35.0 / 2574.0,
    21.0 / 2860.0,
    77.0 / 17680.0,
    143.0 / 51680.0,
];

fn far_series(q: f64, coeffs: &[f64]) -> f64 {
    let q2 = q * q;
    coeffs.iter().rev().fold(0.0, |acc, c| acc * q2 + c) * q2 * q2 * q
}

/// Radial force of a D₂ disk.
pub fn eval_d2_force(disk: &D2Disk, r: f64) -> Result<f64> {
    disk.validate()?;
    disk.force(r)
}

/// Potential of a D₂ disk on its own plane.
pub fn eval_d2_potential(disk: &D2Disk, r: f64) -> Result<f64> {
    disk.validate()?;
    disk.potential(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskModel {
    /// Single D₂ disk centered on the origin.
    D2(D2Disk),
    /// Two D₂ disks centered at `(±offset, 0)`.
    D2Pair { disk: D2Disk, offset: f64 },
    /// `e^{-2r²} (2 + cos(2θ + 16r))`.
    LogSpiral,
    /// Constant density everywhere.
    Uniform(f64),
}

impl DiskModel {
    pub fn d2(alpha: f64, sigma0: f64) -> Result<Self> {
        Ok(Self::D2(D2Disk::new(alpha, sigma0)?))
    }

    pub fn d2_pair(alpha: f64, sigma0: f64, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return invalid("pair offset must be finite");
        }
        Ok(Self::D2Pair { disk: D2Disk::new(alpha, sigma0)?, offset })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::D2(_) => "d2",
            Self::D2Pair { .. } => "d2-pair",
            Self::LogSpiral => "log-spiral",
            Self::Uniform(_) => "uniform",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::D2(d) | Self::D2Pair { disk: d, .. } => d.validate(),
            Self::LogSpiral => Ok(()),
            Self::Uniform(c) if c.is_finite() => Ok(()),
            Self::Uniform(c) => invalid(format!("uniform density must be finite, got {c}")),
        }
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::D2(d) => d.density(x.hypot(y)),
            Self::D2Pair { disk, offset } => {
                disk.density((x - offset).hypot(y)) + disk.density((x + offset).hypot(y))
            }
            Self::LogSpiral => {
                let r = x.hypot(y);
                let theta = y.atan2(x);
                (-2.0 * r * r).exp() * (2.0 + (2.0 * theta + 16.0 * r).cos())
            }
            Self::Uniform(c) => *c,
        }
    }

    /// Closed-form `(∂Σ/∂x, ∂Σ/∂y)`.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Self::D2(d) => radial_gradient(d, x, y),
            Self::D2Pair { disk, offset } => {
                let (ax, ay) = radial_gradient(disk, x - offset, y);
                let (bx, by) = radial_gradient(disk, x + offset, y);
                (ax + bx, ay + by)
            }
            Self::LogSpiral => {
                let r = x.hypot(y);
                if r == 0.0 {
                    return (0.0, 0.0);
                }
                let theta = y.atan2(x);
                let e = (-2.0 * r * r).exp();
                let phase = 2.0 * theta + 16.0 * r;
                let sigma = e * (2.0 + phase.cos());
                let d_r = -4.0 * r * sigma - 16.0 * e * phase.sin();
                let d_theta = -2.0 * e * phase.sin();
                let (c, s) = (x / r, y / r);
                (d_r * c - d_theta * s / r, d_r * s + d_theta * c / r)
            }
            Self::Uniform(_) => (0.0, 0.0),
        }
    }

    /// Whether the closed-form gradient is trustworthy on every cell.
    ///
    /// The spiral density is discontinuous at the origin, so its partials
    /// blow up in the central cells and difference slopes are used instead.
    pub fn has_analytic_slopes(&self) -> bool {
        !matches!(self, Self::LogSpiral)
    }

    /// Exact in-plane force `(F_x, F_y)` when a closed form exists.
    pub fn exact_force(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        match self {
            Self::D2(d) => Some(radial_force(d, x, y)),
            Self::D2Pair { disk, offset } => {
                let (ax, ay) = radial_force(disk, x - offset, y);
                let (bx, by) = radial_force(disk, x + offset, y);
                Some((ax + bx, ay + by))
            }
            _ => None,
        }
    }

    /// Exact potential on the plane when a closed form exists.
    pub fn exact_potential(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Self::D2(d) => d.potential(x.hypot(y)).ok(),
            Self::D2Pair { disk, offset } => Some(
                disk.potential((x - offset).hypot(y)).ok()?
                    + disk.potential((x + offset).hypot(y)).ok()?,
            ),
            _ => None,
        }
    }
}

fn radial_gradient(d: &D2Disk, x: f64, y: f64) -> (f64, f64) {
    let r = x.hypot(y);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let s = d.density_slope(r);
    (s * x / r, s * y / r)
}

fn radial_force(d: &D2Disk, x: f64, y: f64) -> (f64, f64) {
    let r = x.hypot(y);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let f = d.force(r).unwrap_or(0.0);
    (f * x / r, f * y / r)
}

/// Where the slope arrays of a [`DensityField`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeSource {
    Analytic,
    Difference,
}

impl SlopeSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Difference => "difference",
        }
    }
}

/// How to obtain slopes when sampling a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlopeMode {
    /// Closed-form partials when the model has trustworthy ones, otherwise differences.
    #[default]
    Auto,
    Analytic,
    Difference,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldGrid {
    Cartesian(CartesianGrid),
    Polar(PolarGrid),
}

impl FieldGrid {
    pub fn n(&self) -> usize {
        match self {
            Self::Cartesian(g) => g.n(),
            Self::Polar(g) => g.n(),
        }
    }

    /// Cell areas laid out like the field arrays.
    pub fn cell_areas(&self) -> Array2<f64> {
        let n = self.n();
        match self {
            Self::Cartesian(g) => Array2::from_elem((n, n), g.cell_area()),
            Self::Polar(g) => Array2::from_shape_fn((n, n), |(i, _)| g.cell_area(i)),
        }
    }
}

/// Density and slopes at the hole cells of a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleRing {
    pub values: Array1<f64>,
    pub radial_slopes: Array1<f64>,
    pub angular_slopes: Array1<f64>,
}

/// Cell-centered surface density with first partials at the centers.
///
/// Arrays are indexed `[i, j]`: `i` along x (or radius), `j` along y (or
/// angle). On a polar grid the slopes are `∂Σ/∂r` and `∂Σ/∂θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: FieldGrid,
    values: Array2<f64>,
    slopes: [Array2<f64>; 2],
    hole: Option<HoleRing>,
    slope_source: SlopeSource,
}

impl DensityField {
    /// Assembles a field from precomputed arrays, checking shapes.
    pub fn from_parts(
        grid: FieldGrid,
        values: Array2<f64>,
        slopes: [Array2<f64>; 2],
        hole: Option<HoleRing>,
        slope_source: SlopeSource,
    ) -> Result<Self> {
        let n = grid.n();
        let shape_ok = |a: &Array2<f64>| a.dim() == (n, n);
        if !shape_ok(&values) || !slopes.iter().all(shape_ok) {
            return invalid(format!("density arrays must be {n}×{n}"));
        }
        match (&grid, &hole) {
            (FieldGrid::Cartesian(_), Some(_)) => {
                return invalid("Cartesian fields have no hole ring");
            }
            (FieldGrid::Polar(_), None) => return invalid("polar fields need a hole ring"),
            (FieldGrid::Polar(_), Some(h)) => {
                if h.values.len() != n || h.radial_slopes.len() != n || h.angular_slopes.len() != n {
                    return invalid(format!("hole ring arrays must have length {n}"));
                }
            }
            _ => {}
        }
        Ok(Self { grid, values, slopes, hole, slope_source })
    }

    /// Gridded Cartesian data with slopes from second-order differences.
    pub fn from_cartesian_values(grid: &CartesianGrid, values: Array2<f64>) -> Result<Self> {
        let n = grid.n();
        if values.dim() != (n, n) {
            return invalid(format!("density array must be {n}×{n}, got {:?}", values.dim()));
        }
        let slopes = cartesian_difference_slopes(&values, grid.spacing());
        Self::from_parts(FieldGrid::Cartesian(grid.clone()), values, slopes, None, SlopeSource::Difference)
    }

    /// Gridded polar data (regular cells plus hole ring) with difference slopes.
    pub fn from_polar_values(grid: &PolarGrid, values: Array2<f64>, hole: Array1<f64>) -> Result<Self> {
        let n = grid.n();
        if values.dim() != (n, n) || hole.len() != n {
            return invalid(format!("polar density must be {n}×{n} plus a ring of {n}"));
        }
        let (slopes, ring) = polar_difference_slopes(grid, &values, hole);
        Self::from_parts(FieldGrid::Polar(grid.clone()), values, slopes, Some(ring), SlopeSource::Difference)
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// `(∂Σ/∂x, ∂Σ/∂y)` or `(∂Σ/∂r, ∂Σ/∂θ)`.
    pub fn slopes(&self) -> (&Array2<f64>, &Array2<f64>) {
        (&self.slopes[0], &self.slopes[1])
    }

    pub fn hole(&self) -> Option<&HoleRing> {
        self.hole.as_ref()
    }

    pub fn slope_source(&self) -> SlopeSource {
        self.slope_source
    }

    /// `a·self + b·other`, for fields on the same grid.
    pub fn combine(&self, a: f64, other: &DensityField, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return invalid("fields live on different grids");
        }
        let lin = |x: &Array2<f64>, y: &Array2<f64>| x * a + y * b;
        let hole = match (&self.hole, &other.hole) {
            (Some(p), Some(q)) => Some(HoleRing {
                values: &p.values * a + &q.values * b,
                radial_slopes: &p.radial_slopes * a + &q.radial_slopes * b,
                angular_slopes: &p.angular_slopes * a + &q.angular_slopes * b,
            }),
            _ => None,
        };
        let source = if self.slope_source == other.slope_source {
            self.slope_source
        } else {
            SlopeSource::Difference
        };
        Ok(Self {
            grid: self.grid.clone(),
            values: lin(&self.values, &other.values),
            slopes: [lin(&self.slopes[0], &other.slopes[0]), lin(&self.slopes[1], &other.slopes[1])],
            hole,
            slope_source: source,
        })
    }
}

fn resolve_mode(model: &DiskModel, mode: SlopeMode) -> SlopeSource {
    match mode {
        SlopeMode::Analytic => SlopeSource::Analytic,
        SlopeMode::Difference => SlopeSource::Difference,
        SlopeMode::Auto if model.has_analytic_slopes() => SlopeSource::Analytic,
        SlopeMode::Auto => SlopeSource::Difference,
    }
}

/// Samples `model` at the cell centers of `grid`.
pub fn sample_density(model: &DiskModel, grid: &FieldGrid, mode: SlopeMode) -> Result<DensityField> {
    match grid {
        FieldGrid::Cartesian(g) => sample_cartesian(model, g, mode),
        FieldGrid::Polar(g) => sample_polar(model, g, mode),
    }
}

pub fn sample_cartesian(model: &DiskModel, grid: &CartesianGrid, mode: SlopeMode) -> Result<DensityField> {
    model.validate()?;
    let n = grid.n();
    let c = grid.centers();
    let values = Array2::from_shape_fn((n, n), |(i, j)| model.density(c[i], c[j]));
    let source = resolve_mode(model, mode);
    let slopes = match source {
        SlopeSource::Analytic => {
            let g = Array2::from_shape_fn((n, n), |(i, j)| model.gradient(c[i], c[j]));
            [g.mapv(|v| v.0), g.mapv(|v| v.1)]
        }
        SlopeSource::Difference => cartesian_difference_slopes(&values, grid.spacing()),
    };
    DensityField::from_parts(FieldGrid::Cartesian(grid.clone()), values, slopes, None, source)
}

pub fn sample_polar(model: &DiskModel, grid: &PolarGrid, mode: SlopeMode) -> Result<DensityField> {
    model.validate()?;
    let n = grid.n();
    let rc = grid.radial_centers();
    let tc = grid.angular_centers();
    let r0 = grid.hole_center();
    let at = |r: f64, t: f64| (r * t.cos(), r * t.sin());
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let (x, y) = at(rc[i], tc[j]);
        model.density(x, y)
    });
    let hole_values = Array1::from_shape_fn(n, |j| {
        let (x, y) = at(r0, tc[j]);
        model.density(x, y)
    });
    let source = resolve_mode(model, mode);
    let (slopes, ring) = match source {
        SlopeSource::Analytic => {
            let polar_slopes = |r: f64, t: f64| {
                let (x, y) = at(r, t);
                let (gx, gy) = model.gradient(x, y);
                let (c, s) = (t.cos(), t.sin());
                (gx * c + gy * s, r * (gy * c - gx * s))
            };
            let g = Array2::from_shape_fn((n, n), |(i, j)| polar_slopes(rc[i], tc[j]));
            let h: Vec<(f64, f64)> = tc.iter().map(|&t| polar_slopes(r0, t)).collect();
            (
                [g.mapv(|v| v.0), g.mapv(|v| v.1)],
                HoleRing {
                    values: hole_values,
                    radial_slopes: h.iter().map(|v| v.0).collect(),
                    angular_slopes: h.iter().map(|v| v.1).collect(),
                },
            )
        }
        SlopeSource::Difference => polar_difference_slopes(grid, &values, hole_values),
    };
    DensityField::from_parts(FieldGrid::Polar(grid.clone()), values, slopes, Some(ring), source)
}

/// Second-order derivative on a uniform line with one-sided second-order ends.
pub fn uniform_gradient(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![(f[1] - f[0]) / h; 2],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * h)
                } else if i == n - 1 {
                    -(4.0 * (f[n - 2] - f[n - 1]) - (f[n - 3] - f[n - 1])) / (2.0 * h)
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
    }
}

/// Second-order derivative on a non-uniform line with one-sided second-order ends.
pub fn nonuniform_gradient(f: &[f64], x: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert_eq!(n, x.len());
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![(f[1] - f[0]) / (x[1] - x[0]); 2],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
                    let s = h1 + h2;
                    ((f[1] - f[0]) * s * s - (f[2] - f[0]) * h1 * h1) / (h1 * h2 * s)
                } else if i == n - 1 {
                    let (d1, d2) = (x[n - 1] - x[n - 2], x[n - 2] - x[n - 3]);
                    let s = d1 + d2;
                    -((f[n - 2] - f[n - 1]) * s * s - (f[n - 3] - f[n - 1]) * d1 * d1) / (d1 * d2 * s)
                } else {
                    let (h1, h2) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                    (h1 * h1 * (f[i + 1] - f[i]) + h2 * h2 * (f[i] - f[i - 1])) / (h1 * h2 * (h1 + h2))
                }
            })
            .collect(),
    }
}

fn periodic_gradient(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|j| (f[(j + 1) % n] - f[(j + n - 1) % n]) / (2.0 * h)).collect()
}

fn cartesian_difference_slopes(values: &Array2<f64>, h: f64) -> [Array2<f64>; 2] {
    let (n, m) = values.dim();
    let mut dx = Array2::zeros((n, m));
    let mut dy = Array2::zeros((n, m));
    for j in 0..m {
        let col: Vec<f64> = values.column(j).to_vec();
        for (i, v) in uniform_gradient(&col, h).into_iter().enumerate() {
            dx[[i, j]] = v;
        }
    }
    for i in 0..n {
        let row: Vec<f64> = values.row(i).to_vec();
        for (j, v) in uniform_gradient(&row, h).into_iter().enumerate() {
            dy[[i, j]] = v;
        }
    }
    [dx, dy]
}

fn polar_difference_slopes(grid: &PolarGrid, values: &Array2<f64>, hole: Array1<f64>) -> ([Array2<f64>; 2], HoleRing) {
    let n = grid.n();
    let mut radii = vec![grid.hole_center()];
    radii.extend_from_slice(grid.radial_centers());
    let mut dr = Array2::zeros((n, n));
    let mut hole_dr = Array1::zeros(n);
    for j in 0..n {
        let mut line = vec![hole[j]];
        line.extend(values.column(j).iter());
        let d = nonuniform_gradient(&line, &radii);
        hole_dr[j] = d[0];
        for i in 0..n {
            dr[[i, j]] = d[i + 1];
        }
    }
    let mut dt = Array2::zeros((n, n));
    for i in 0..n {
        let row: Vec<f64> = values.row(i).to_vec();
        for (j, v) in periodic_gradient(&row, grid.dtheta()).into_iter().enumerate() {
            dt[[i, j]] = v;
        }
    }
    let hole_dt = Array1::from(periodic_gradient(hole.as_slice().unwrap_or(&hole.to_vec()), grid.dtheta()));
    (
        [dr, dt],
        HoleRing { values: hole, radial_slopes: hole_dr, angular_slopes: hole_dt },
    )
}

impl From<CartesianGrid> for FieldGrid {
    fn from(g: CartesianGrid) -> Self {
        Self::Cartesian(g)
    }
}

impl From<PolarGrid> for FieldGrid {
    fn from(g: PolarGrid) -> Self {
        Self::Polar(g)
    }
}

impl TryFrom<&FieldGrid> for CartesianGrid {
    type Error = Error;
    fn try_from(g: &FieldGrid) -> Result<Self> {
        match g {
            FieldGrid::Cartesian(c) => Ok(c.clone()),
            FieldGrid::Polar(_) => invalid("expected a Cartesian grid"),
        }
    }
}
