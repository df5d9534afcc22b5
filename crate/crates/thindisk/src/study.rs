//! Convergence sweeps over grid resolutions.

use crate::analysis::{difference_norms, four_closest_average, ConvergenceReport, Norms};
use crate::baselines::{solve_softened_cartesian, SofteningConfig};
use crate::cartesian_kernels::KernelTables;
use crate::density::{sample_cartesian, sample_polar, DiskModel, FieldGrid, SlopeMode};
use crate::error::{invalid, Result};
use crate::grid::{CartesianGrid, PolarGrid};
use crate::polar_kernels::PolarKernelTables;
use crate::solver::{exact_force_field, solve_cartesian_with, solve_polar_with, ForceField, SignConvention};

/// Disk radius at which the published accuracy tables are reproduced on `[-1, 1]²`.
pub const TABLE_DISK_RADIUS: f64 = 0.5;

/// Center offset of each disk in the two-disk test.
pub const TABLE_PAIR_OFFSET: f64 = 0.25;

pub fn table_disk() -> DiskModel {
    DiskModel::d2(TABLE_DISK_RADIUS, 1.0).expect("valid preset")
}

pub fn table_pair() -> DiskModel {
    DiskModel::d2_pair(TABLE_DISK_RADIUS, 1.0, TABLE_PAIR_OFFSET).expect("valid preset")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub half_width: f64,
    pub beta0: f64,
    pub slope_mode: SlopeMode,
    pub convention: SignConvention,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { half_width: 1.0, beta0: 0.99, slope_mode: SlopeMode::Auto, convention: SignConvention::PaperLiteral }
    }
}

fn cartesian_norms(numeric: &ForceField, exact: &ForceField) -> Result<Vec<Norms>> {
    let areas = numeric.grid().cell_areas();
    let [a0, a1] = numeric.components();
    let [b0, b1] = exact.components();
    Ok(vec![
        difference_norms(a0, b0, &areas)?,
        difference_norms(a1, b1, &areas)?,
        difference_norms(&numeric.radial(), &exact.radial(), &areas)?,
    ])
}

fn metadata(report: &mut ConvergenceReport, opts: &SweepOptions, slope: &str) {
    report.set_meta("half_width", opts.half_width);
    report.set_meta("slopes", slope);
    report.set_meta("convention", opts.convention.name());
}

/// Solves `model` on one Cartesian grid with the proposed method.
pub fn solve_cartesian_model(model: &DiskModel, n: usize, opts: &SweepOptions) -> Result<ForceField> {
    let grid = CartesianGrid::new(opts.half_width, n)?;
    let field = sample_cartesian(model, &grid, opts.slope_mode)?;
    let tables = KernelTables::tabulate(&grid);
    solve_cartesian_with(&field, &tables, opts.convention)
}

fn exact_or_err(model: &DiskModel, grid: FieldGrid, convention: SignConvention) -> Result<ForceField> {
    exact_force_field(model, &grid, convention)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("model {} has no closed-form force", model.name())))
}

/// Proposed Cartesian method against the closed-form force.
pub fn cartesian_sweep(model: &DiskModel, ns: &[usize], opts: &SweepOptions) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new("proposed-cartesian", model.name(), &["x", "y", "R"]);
    let mut slope = "";
    for &n in ns {
        let grid = CartesianGrid::new(opts.half_width, n)?;
        let field = sample_cartesian(model, &grid, opts.slope_mode)?;
        slope = field.slope_source().name();
        let tables = KernelTables::tabulate(&grid);
        let numeric = solve_cartesian_with(&field, &tables, opts.convention)?;
        let exact = exact_or_err(model, FieldGrid::Cartesian(grid), opts.convention)?;
        report.push(n, cartesian_norms(&numeric, &exact)?)?;
    }
    metadata(&mut report, opts, slope);
    Ok(report)
}

/// Proposed polar method against the closed-form force.
pub fn polar_sweep(model: &DiskModel, ns: &[usize], opts: &SweepOptions) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new("proposed-polar", model.name(), &["r", "theta"]);
    let mut slope = "";
    for &n in ns {
        let grid = PolarGrid::new(opts.half_width, n, opts.beta0)?;
        let field = sample_polar(model, &grid, opts.slope_mode)?;
        slope = field.slope_source().name();
        let tables = PolarKernelTables::tabulate(&grid);
        let numeric = solve_polar_with(&field, &tables, opts.convention)?;
        let exact = exact_or_err(model, FieldGrid::Polar(grid), opts.convention)?;
        let areas = numeric.grid().cell_areas();
        let norms = numeric
            .components()
            .iter()
            .zip(exact.components())
            .map(|(a, b)| difference_norms(a, b, &areas))
            .collect::<Result<_>>()?;
        report.push(n, norms)?;
    }
    metadata(&mut report, opts, slope);
    report.set_meta("beta0", opts.beta0);
    Ok(report)
}

/// Softened point-mass baseline against the closed-form force.
pub fn softened_sweep(model: &DiskModel, ns: &[usize], opts: &SweepOptions, cfg: &SofteningConfig) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new("softening", model.name(), &["x", "y", "R"]);
    for &n in ns {
        let grid = CartesianGrid::new(opts.half_width, n)?;
        let field = sample_cartesian(model, &grid, opts.slope_mode)?;
        let numeric = solve_softened_cartesian(&field, cfg)?.with_convention(opts.convention);
        let exact = exact_or_err(model, FieldGrid::Cartesian(grid), opts.convention)?;
        report.push(n, cartesian_norms(&numeric, &exact)?)?;
    }
    metadata(&mut report, opts, "unused");
    match cfg.epsilon {
        Some(e) => report.set_meta("epsilon", e),
        None => report.set_meta("epsilon", "cell"),
    }
    Ok(report)
}

/// Proposed Cartesian method against its own solution on an `n_truth` grid,
/// reduced by averaging the four fine cells closest to each coarse center.
pub fn self_convergence_sweep(model: &DiskModel, ns: &[usize], n_truth: usize, opts: &SweepOptions) -> Result<ConvergenceReport> {
    if let Some(&n) = ns.iter().find(|&&n| n >= n_truth || n_truth % n != 0 || (n_truth / n) % 2 != 0) {
        return invalid(format!("resolution {n} does not nest in the reference resolution {n_truth}"));
    }
    let truth = solve_cartesian_model(model, n_truth, opts)?;
    let truth_radial = truth.radial();
    let mut report = ConvergenceReport::new("proposed-cartesian-self", model.name(), &["x", "y", "R"]);
    let mut slope = "";
    for &n in ns {
        let grid = CartesianGrid::new(opts.half_width, n)?;
        let field = sample_cartesian(model, &grid, opts.slope_mode)?;
        slope = field.slope_source().name();
        let tables = KernelTables::tabulate(&grid);
        let numeric = solve_cartesian_with(&field, &tables, opts.convention)?;
        let areas = numeric.grid().cell_areas();
        let [fx, fy] = numeric.components();
        let [tx, ty] = truth.components();
        report.push(
            n,
            vec![
                difference_norms(fx, &four_closest_average(tx, n)?, &areas)?,
                difference_norms(fy, &four_closest_average(ty, n)?, &areas)?,
                difference_norms(&numeric.radial(), &four_closest_average(&truth_radial, n)?, &areas)?,
            ],
        )?;
    }
    metadata(&mut report, opts, slope);
    report.set_meta("reference_n", n_truth);
    Ok(report)
}
