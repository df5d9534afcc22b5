//! Wall-clock timing of kernel generation and force evaluation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::baselines::SoftenedKernel;
use crate::cartesian_kernels::KernelTables;
use crate::density::{sample_cartesian, DiskModel, SlopeMode};
use crate::error::{invalid, Error, Result};
use crate::grid::CartesianGrid;
use crate::solver::{solve_cartesian, solve_cartesian_direct};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Kernel,
    Force,
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    /// Closed-form kernels with FFT convolution.
    Proposed,
    /// Softened point masses with FFT convolution.
    Softened,
    /// Closed-form kernels summed in an `O(N⁴)` loop.
    Direct,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Kernel, Phase::Force, Phase::Whole];

    pub fn name(self) -> &'static str {
        match self {
            Self::Kernel => "kernel",
            Self::Force => "force",
            Self::Whole => "whole",
        }
    }
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Softened => "softening",
            Self::Direct => "direct",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown phase {s:?}")))
    }
}

impl FromStr for BenchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::Proposed, Self::Softened, Self::Direct]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub phase: Phase,
    pub method: BenchMethod,
    pub n: usize,
    pub mean_seconds: f64,
    pub repetitions: usize,
}

/// Mean over `reps` timed runs after one untimed warm-up run.
fn mean_time(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    f()?;
    let mut total = 0.0;
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        total += start.elapsed().as_secs_f64();
    }
    Ok(total / reps as f64)
}

/// Times one phase of one method on `model` with `N` cells per side.
///
/// Kernel covers tabulation and kernel spectra, force covers the solve with
/// kernels already in hand, whole covers sampling, kernels and solve together.
pub fn time_phase(method: BenchMethod, phase: Phase, model: &DiskModel, n: usize, half_width: f64, reps: usize) -> Result<TimingRecord> {
    if reps == 0 {
        return invalid("at least one repetition is needed");
    }
    let grid = CartesianGrid::new(half_width, n)?;
    let field = sample_cartesian(model, &grid, SlopeMode::Auto)?;
    let eps = grid.spacing();
    let mean_seconds = match (method, phase) {
        (BenchMethod::Proposed, Phase::Kernel) => mean_time(reps, || {
            KernelTables::tabulate(&grid).spectra();
            Ok(())
        })?,
        (BenchMethod::Proposed, Phase::Force) => {
            let tables = KernelTables::tabulate(&grid);
            tables.spectra();
            mean_time(reps, || solve_cartesian(&field, &tables).map(drop))?
        }
        (BenchMethod::Proposed, Phase::Whole) => mean_time(reps, || {
            let f = sample_cartesian(model, &grid, SlopeMode::Auto)?;
            solve_cartesian(&f, &KernelTables::tabulate(&grid)).map(drop)
        })?,
        (BenchMethod::Softened, Phase::Kernel) => mean_time(reps, || SoftenedKernel::new(&grid, eps).map(drop))?,
        (BenchMethod::Softened, Phase::Force) => {
            let k = SoftenedKernel::new(&grid, eps)?;
            mean_time(reps, || k.force(&field).map(drop))?
        }
        (BenchMethod::Softened, Phase::Whole) => mean_time(reps, || {
            let f = sample_cartesian(model, &grid, SlopeMode::Auto)?;
            SoftenedKernel::new(&grid, eps)?.force(&f).map(drop)
        })?,
        (BenchMethod::Direct, Phase::Kernel) => mean_time(reps, || {
            KernelTables::tabulate(&grid);
            Ok(())
        })?,
        (BenchMethod::Direct, Phase::Force) => {
            let tables = KernelTables::tabulate(&grid);
            mean_time(reps, || solve_cartesian_direct(&field, &tables).map(drop))?
        }
        (BenchMethod::Direct, Phase::Whole) => mean_time(reps, || {
            let f = sample_cartesian(model, &grid, SlopeMode::Auto)?;
            solve_cartesian_direct(&f, &KernelTables::tabulate(&grid)).map(drop)
        })?,
    };
    Ok(TimingRecord { phase, method, n, mean_seconds, repetitions: reps })
}

/// Times all three phases of one method.
pub fn time_method(method: BenchMethod, model: &DiskModel, n: usize, half_width: f64, reps: usize) -> Result<Vec<TimingRecord>> {
    Phase::ALL
        .into_iter()
        .map(|phase| time_phase(method, phase, model, n, half_width, reps))
        .collect()
}

/// Runs every method at every `N`.
pub fn run_bench(methods: &[BenchMethod], model: &DiskModel, ns: &[usize], half_width: f64, reps: usize) -> Result<Vec<TimingRecord>> {
    let mut out = Vec::new();
    for &method in methods {
        for &n in ns {
            out.extend(time_method(method, model, n, half_width, reps)?);
        }
    }
    Ok(out)
}

/// Mean time of `phase` for `method` at `n`, if present.
pub fn lookup(records: &[TimingRecord], method: BenchMethod, phase: Phase, n: usize) -> Option<f64> {
    records
        .iter()
        .find(|r| r.method == method && r.phase == phase && r.n == n)
        .map(|r| r.mean_seconds)
}

pub const CSV_HEADER: &str = "phase,method,N,mean_seconds,repetitions";

pub fn records_to_csv(records: &[TimingRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!("{},{},{},{:?},{}\n", r.phase, r.method, r.n, r.mean_seconds, r.repetitions));
    }
    s
}

pub fn records_from_csv(text: &str) -> Result<Vec<TimingRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Format("timing CSV header mismatch".into()));
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            let bad = || Error::Format(format!("bad timing row {l:?}"));
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(TimingRecord {
                phase: f[0].parse()?,
                method: f[1].parse().map_err(|_| bad())?,
                n: f[2].parse().map_err(|_| bad())?,
                mean_seconds: f[3].parse().map_err(|_| bad())?,
                repetitions: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::table_disk;

    #[test]
    fn records_round_trip_through_csv() {
        let recs = run_bench(&[BenchMethod::Proposed, BenchMethod::Softened], &table_disk(), &[8], 1.0, 1).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(records_from_csv(&records_to_csv(&recs)).unwrap(), recs);
    }

    #[test]
    fn zero_repetitions_rejected() {
        assert!(time_method(BenchMethod::Direct, &table_disk(), 8, 1.0, 0).is_err());
    }
}
