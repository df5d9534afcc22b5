//! `thindisk`: forces, convergence tables, timings and kernel dumps from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thindisk::bench::BenchMethod;

use crate::commands::{Convention, Coords, Method, ModelKind, Slopes, SweepMethod, TableFormat};
use crate::config::Config;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Io(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<thindisk::Error> for CliError {
    fn from(e: thindisk::Error) -> Self {
        match e {
            thindisk::Error::InvalidArgument(_) => Self::Usage(e.to_string()),
            thindisk::Error::Format(_) => Self::Io(e.to_string()),
            thindisk::Error::SingularEvaluation(_) | thindisk::Error::Range(_) => Self::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "thindisk", version, about = "Self-gravity of thin disks by closed-form kernel convolution")]
struct Cli {
    /// Worker threads (falls back to THINDISK_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Force field for one grid; writes one text grid per component.
    Solve(SolveArgs),
    /// Error norms and orders over a list of resolutions, as CSV.
    Converge(ConvergeArgs),
    /// Mean wall-clock times per phase, as CSV.
    Bench(BenchArgs),
    /// Tabulate kernels and dump them as a binary cache or CSV.
    Kernels(KernelArgs),
    /// Trapezoid error on the logarithmic singularity, as CSV.
    SingularStudy(SingularArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// d2, d2-pair, log-spiral or uniform.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Disk radius of the D₂ models.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Central density (or the constant of the uniform model).
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Center offset of each disk in d2-pair.
    #[arg(long)]
    pub offset: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// cartesian or polar.
    #[arg(long)]
    pub coords: Option<Coords>,
    /// Half side of the Cartesian domain, or outer radius of the polar one.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Polar aspect parameter.
    #[arg(long)]
    pub beta0: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
    /// proposed, direct, softening or kalnajs.
    #[arg(long)]
    pub method: Option<Method>,
    /// auto, analytic or difference.
    #[arg(long)]
    pub slopes: Option<Slopes>,
    /// paper-literal or potential-gradient.
    #[arg(long)]
    pub convention: Option<Convention>,
    /// Softening length; defaults to one cell.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Density grid file to solve instead of a model.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Directory for the output grids.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Binary kernel cache, read if it matches the grid and written otherwise.
    #[arg(long)]
    pub kernel_cache: Option<PathBuf>,
    #[command(flatten)]
    pub kalnajs: KalnajsArgs,
}

#[derive(Debug, Args, Clone)]
pub struct KalnajsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub u_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub n_alpha: Option<usize>,
    #[arg(long)]
    pub n_u: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated resolutions.
    #[arg(long = "N", alias = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// proposed, softening or self.
    #[arg(long)]
    pub method: Option<SweepMethod>,
    /// Reference resolution for self-convergence.
    #[arg(long)]
    pub reference_n: Option<usize>,
    #[arg(long)]
    pub slopes: Option<Slopes>,
    #[arg(long)]
    pub convention: Option<Convention>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "N", alias = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Comma-separated: proposed, softening, direct.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<BenchMethod>>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct KernelArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
    /// binary (reusable cache) or csv.
    #[arg(long)]
    pub format: Option<TableFormat>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SingularArgs {
    /// Comma-separated k values, θ = 2^-k.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<u32>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn thread_count(flag: Option<usize>, cfg: &Config) -> Result<Option<usize>, CliError> {
    let env = match std::env::var("THINDISK_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|e| CliError::Usage(format!("THINDISK_THREADS: {e}")))?),
        Err(_) => None,
    };
    let n = cfg.maybe(flag, "threads")?.or(env);
    if n == Some(0) {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(n) = thread_count(cli.threads, &cfg)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Solve(a) => commands::solve(&a, &cfg),
        Command::Converge(a) => commands::converge(&a, &cfg),
        Command::Bench(a) => commands::bench(&a, &cfg),
        Command::Kernels(a) => commands::kernels(&a, &cfg),
        Command::SingularStudy(a) => commands::singular_study(&a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thindisk: {e}");
            ExitCode::from(e.code())
        }
    }
}
