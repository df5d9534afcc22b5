//! Uniform Cartesian and logarithmic polar discretizations.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Square domain `[-M, M]²` split into `N × N` equal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    half_width: f64,
    n: usize,
    dx: f64,
    edges: Vec<f64>,
    centers: Vec<f64>,
}

impl CartesianGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return invalid(format!("half width must be positive, got {half_width}"));
        }
        if n < 2 {
            return invalid(format!("need at least 2 zones per side, got {n}"));
        }
        let dx = 2.0 * half_width / n as f64;
        let mut edges: Vec<f64> = (0..=n).map(|i| -half_width + i as f64 * dx).collect();
        edges[n] = half_width;
        let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self { half_width, n, dx, edges, centers })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell width, identical in x and y.
    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Whether `fine` is the factor-two refinement of this grid.
    pub fn refines_to(&self, fine: &CartesianGrid) -> bool {
        fine.n == 2 * self.n && fine.half_width == self.half_width
    }
}

/// Logarithmic polar grid on the disk of radius `M`.
///
/// Radial edges are `r_{i+1/2} = β^{N-i} M` for `i = 0..=N` and radial
/// centers are arithmetic midpoints of adjacent edges. The region inside the
/// innermost edge is covered by a ring of "hole" cells handled separately.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    outer_radius: f64,
    n: usize,
    beta0: f64,
    beta: f64,
    dtheta: f64,
    radial_edges: Vec<f64>,
    radial_centers: Vec<f64>,
    angular_edges: Vec<f64>,
    angular_centers: Vec<f64>,
}

impl PolarGrid {
    pub fn new(outer_radius: f64, n: usize, beta0: f64) -> Result<Self> {
        if !(outer_radius > 0.0) || !outer_radius.is_finite() {
            return invalid(format!("outer radius must be positive, got {outer_radius}"));
        }
        if !(beta0 > 0.0 && beta0 < 1.0) {
            return invalid(format!("beta0 must lie in (0, 1), got {beta0}"));
        }
        if n == 0 {
            return invalid("need at least one zone");
        }
        let dtheta = 2.0 * PI / n as f64;
        let beta = beta0 * (1.0 - dtheta);
        if !(beta > 0.0 && beta < 1.0) {
            return invalid(format!(
                "ratio beta = {beta} is outside (0, 1); the angular spacing 2π/N must be below 1, so N ≥ 7 (got N = {n})"
            ));
        }
        let radial_edges: Vec<f64> =
            (0..=n).map(|i| beta.powi((n - i) as i32) * outer_radius).collect();
        let radial_centers = radial_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let angular_edges = (0..=n).map(|j| j as f64 * dtheta).collect();
        let angular_centers = (0..n).map(|j| (j as f64 + 0.5) * dtheta).collect();
        Ok(Self {
            outer_radius,
            n,
            beta0,
            beta,
            dtheta,
            radial_edges,
            radial_centers,
            angular_edges,
            angular_centers,
        })
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn radial_edges(&self) -> &[f64] {
        &self.radial_edges
    }

    pub fn radial_centers(&self) -> &[f64] {
        &self.radial_centers
    }

    pub fn angular_edges(&self) -> &[f64] {
        &self.angular_edges
    }

    pub fn angular_centers(&self) -> &[f64] {
        &self.angular_centers
    }

    /// Outer radius of the hole ring, `r_{1/2}`.
    pub fn hole_radius(&self) -> f64 {
        self.radial_edges[0]
    }

    /// Representative radius of the hole cells, half the hole radius.
    pub fn hole_center(&self) -> f64 {
        0.5 * self.radial_edges[0]
    }

    /// Area of the regular cell in radial row `i`.
    pub fn cell_area(&self, i: usize) -> f64 {
        let (a, b) = (self.radial_edges[i], self.radial_edges[i + 1]);
        0.5 * (b * b - a * a) * self.dtheta
    }

    /// `r_{i'+1/2} / r_i` for `di = i - i'`.
    pub(crate) fn outer_ratio(&self, di: i64) -> f64 {
        2.0 * self.beta.powi(di as i32) / (1.0 + self.beta)
    }

    /// `r_{i'-1/2} / r_i` for `di = i - i'`.
    pub(crate) fn inner_ratio(&self, di: i64) -> f64 {
        self.outer_ratio(di) * self.beta
    }
}
