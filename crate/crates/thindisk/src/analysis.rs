//! Error norms, orders of accuracy and convergence reports.

use std::fmt::Write as _;

use ndarray::{Array2, Zip};

use crate::density::FieldGrid;
use crate::error::{invalid, Error, Result};
use crate::grid::CartesianGrid;
use crate::quadrature;
use crate::solver::ForceField;

/// Area-weighted `L¹`, `L²` and center-maximum norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl Norms {
    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.linf]
    }
}

/// Norms of `numeric - exact` with per-cell `areas`.
pub fn difference_norms(numeric: &Array2<f64>, exact: &Array2<f64>, areas: &Array2<f64>) -> Result<Norms> {
    if numeric.dim() != exact.dim() || numeric.dim() != areas.dim() {
        return invalid("arrays passed to the norm have different shapes");
    }
    let mut n = Norms::default();
    let mut sq = 0.0;
    Zip::from(numeric).and(exact).and(areas).for_each(|&a, &b, &w| {
        let e = (a - b).abs();
        n.l1 += e * w;
        sq += e * e * w;
        n.linf = n.linf.max(e);
    });
    n.l2 = sq.sqrt();
    Ok(n)
}

/// Per-component error norms between two force fields on one grid.
pub fn error_norms(numeric: &ForceField, exact: &ForceField) -> Result<[Norms; 2]> {
    if numeric.grid() != exact.grid() {
        return invalid("force fields are on different grids");
    }
    if numeric.convention() != exact.convention() {
        return invalid("force fields use different sign conventions");
    }
    let areas = numeric.grid().cell_areas();
    let [a0, a1] = numeric.components();
    let [b0, b1] = exact.components();
    Ok([difference_norms(a0, b0, &areas)?, difference_norms(a1, b1, &areas)?])
}

/// Norms of the radial-component error.
pub fn radial_error_norms(numeric: &ForceField, exact: &ForceField) -> Result<Norms> {
    if numeric.grid() != exact.grid() {
        return invalid("force fields are on different grids");
    }
    difference_norms(&numeric.radial(), &exact.radial(), &numeric.grid().cell_areas())
}

/// `log₂(e_coarse / e_fine)`.
pub fn order_of_accuracy(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0) || !(e_fine > 0.0) {
        return invalid(format!("errors must be positive, got {e_coarse} and {e_fine}"));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Mean of the four children of each coarse cell on the factor-two coarser grid.
pub fn restrict_fine_to_coarse(fine: &ForceField) -> Result<ForceField> {
    let g = match fine.grid() {
        FieldGrid::Cartesian(g) => g,
        FieldGrid::Polar(_) => return invalid("restriction is defined for Cartesian grids"),
    };
    if g.n() % 2 != 0 || g.n() < 4 {
        return invalid(format!("cannot halve a grid with N = {}", g.n()));
    }
    let coarse = CartesianGrid::new(g.half_width(), g.n() / 2)?;
    let [a, b] = fine.components();
    ForceField::new(
        FieldGrid::Cartesian(coarse),
        [average_children(a)?, average_children(b)?],
        fine.convention(),
    )
}

fn average_children(f: &Array2<f64>) -> Result<Array2<f64>> {
    four_closest_average(f, f.nrows() / 2)
}

/// Coarse value at each coarse center as the mean of the four fine cells
/// closest to it, for fine grids `N_fine / N_coarse` times finer.
pub fn four_closest_average(fine: &Array2<f64>, n_coarse: usize) -> Result<Array2<f64>> {
    let nf = fine.nrows();
    if fine.ncols() != nf || n_coarse == 0 || nf % n_coarse != 0 || nf / n_coarse < 2 || (nf / n_coarse) % 2 != 0 {
        return invalid(format!("cannot reduce a {nf}-cell grid to {n_coarse} cells"));
    }
    let r = nf / n_coarse;
    Ok(Array2::from_shape_fn((n_coarse, n_coarse), |(i, j)| {
        let (a, b) = ((i * r + r / 2) - 1, (j * r + r / 2) - 1);
        0.25 * (fine[[a, b]] + fine[[a, b + 1]] + fine[[a + 1, b]] + fine[[a + 1, b + 1]])
    }))
}

/// Error norms for one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    /// One entry per component, in the report's component order.
    pub norms: Vec<Norms>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub method: String,
    pub model: String,
    pub components: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub metadata: Vec<(String, String)>,
}

impl ConvergenceReport {
    pub fn new(method: &str, model: &str, components: &[&str]) -> Self {
        Self {
            method: method.into(),
            model: model.into(),
            components: components.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, n: usize, norms: Vec<Norms>) -> Result<()> {
        if norms.len() != self.components.len() {
            return invalid("row has the wrong number of components");
        }
        self.rows.push(ReportRow { n, norms });
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c == name)
    }

    /// Norms of `component` at resolution `n`.
    pub fn norms(&self, component: &str, n: usize) -> Option<Norms> {
        let c = self.component_index(component)?;
        self.rows.iter().find(|r| r.n == n).map(|r| r.norms[c])
    }

    /// Orders between row `k - 1` and row `k`, per component, for `k ≥ 1`.
    pub fn orders(&self, k: usize) -> Option<Vec<[f64; 3]>> {
        if k == 0 || k >= self.rows.len() {
            return None;
        }
        let (a, b) = (&self.rows[k - 1], &self.rows[k]);
        let steps = (b.n as f64 / a.n as f64).log2();
        Some(
            a.norms
                .iter()
                .zip(&b.norms)
                .map(|(p, q)| {
                    let o = |x: f64, y: f64| order_of_accuracy(x, y).map(|v| v / steps).unwrap_or(f64::NAN);
                    [o(p.l1, q.l1), o(p.l2, q.l2), o(p.linf, q.linf)]
                })
                .collect(),
        )
    }

    /// Orders of one component between the rows for `n_coarse` and `n_fine`.
    pub fn order(&self, component: &str, n_coarse: usize, n_fine: usize) -> Option<[f64; 3]> {
        let c = self.component_index(component)?;
        let k = self.rows.iter().position(|r| r.n == n_fine)?;
        if k == 0 || self.rows[k - 1].n != n_coarse {
            return None;
        }
        self.orders(k).map(|o| o[c])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# method={}", self.method);
        let _ = writeln!(s, "# model={}", self.model);
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        let mut header = vec!["N".to_string()];
        for c in &self.components {
            for col in ["E1", "E2", "Einf", "O1", "O2", "Oinf"] {
                header.push(format!("{c}_{col}"));
            }
        }
        let _ = writeln!(s, "{}", header.join(","));
        for (k, row) in self.rows.iter().enumerate() {
            let orders = self.orders(k);
            let mut cells = vec![row.n.to_string()];
            for (c, norms) in row.norms.iter().enumerate() {
                cells.extend(norms.as_array().iter().map(|v| format!("{v:?}")));
                match &orders {
                    Some(o) => cells.extend(o[c].iter().map(|v| format!("{v:?}"))),
                    None => cells.extend(["", "", ""].iter().map(|v| v.to_string())),
                }
            }
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let fmt = |m: String| Error::Format(m);
        let mut report = Self::default();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let line = lines.next().ok_or_else(|| fmt("missing column header".into()))?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) = meta.split_once('=').ok_or_else(|| fmt(format!("bad metadata line: {line}")))?;
                    match k {
                        "method" => report.method = v.into(),
                        "model" => report.model = v.into(),
                        _ => report.metadata.push((k.into(), v.into())),
                    }
                }
                None => break line,
            }
        };
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"N") || (cols.len() - 1) % 6 != 0 {
            return Err(fmt(format!("unexpected column header: {header}")));
        }
        for chunk in cols[1..].chunks(6) {
            let name = chunk[0]
                .strip_suffix("_E1")
                .ok_or_else(|| fmt(format!("unexpected column {}", chunk[0])))?;
            report.components.push(name.into());
        }
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != cols.len() {
                return Err(fmt(format!("row has {} cells, expected {}", cells.len(), cols.len())));
            }
            let n = cells[0].parse().map_err(|_| fmt(format!("bad N: {}", cells[0])))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| fmt(format!("bad number: {s}")));
            let norms = cells[1..]
                .chunks(6)
                .map(|c| Ok(Norms { l1: num(c[0])?, l2: num(c[1])?, linf: num(c[2])? }))
                .collect::<Result<_>>()?;
            report.rows.push(ReportRow { n, norms });
        }
        Ok(report)
    }
}

/// One line of the singular-trapezoid study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularRow {
    pub k: u32,
    pub theta: f64,
    pub error: f64,
    /// Order against the previous row, when there is one.
    pub order: Option<f64>,
}

/// `ln(1 - cos x)` without cancellation near zero.
fn log_one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    (2.0 * s * s).ln()
}

/// `∫_{-θ}^{θ} ln(1 - cos x) dx`, with the logarithmic singularity integrated exactly.
pub fn singular_integral(theta: f64) -> f64 {
    // ln(1 - cos x) = ln(x²/2) + 2 ln(sin(x/2) / (x/2))
    let singular = theta * (theta * theta / 2.0).ln() - 2.0 * theta;
    let smooth = quadrature::integrate(
        |x: f64| {
            let h = 0.5 * x;
            2.0 * (h.sin() / h).ln()
        },
        0.0,
        theta,
        1e-16,
        1e-14,
    );
    2.0 * (singular + smooth)
}

/// Error of the two-node trapezoid rule for `∫_{-θ}^{θ} ln(1 - cos x) dx`, `θ = 2^{-k}`.
pub fn singular_trapezoid_study(ks: &[u32]) -> Result<Vec<SingularRow>> {
    let mut out: Vec<SingularRow> = Vec::with_capacity(ks.len());
    for &k in ks {
        if k < 2 {
            return invalid(format!("k must be at least 2, got {k}"));
        }
        let theta = 0.5f64.powi(k as i32);
        let trapezoid = 2.0 * theta * log_one_minus_cos(theta);
        let error = (singular_integral(theta) - trapezoid).abs();
        let order = out
            .last()
            .filter(|p| p.k + 1 == k)
            .and_then(|p| order_of_accuracy(p.error, error).ok());
        out.push(SingularRow { k, theta, error, order });
    }
    Ok(out)
}
