use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;

use thindisk::analysis::{error_norms, radial_error_norms, singular_trapezoid_study, Norms};
use thindisk::baselines::{kalnajs_potential_axisym, solve_softened_cartesian, KalnajsConfig, SofteningConfig};
use thindisk::bench::{records_to_csv, run_bench, BenchMethod};
use thindisk::cache::{decode, encode_cartesian, encode_polar, CachedTables};
use thindisk::cartesian_kernels::{CartesianKernel, KernelTables};
use thindisk::convolve::unwrap_offset;
use thindisk::density::{sample_density, DensityField, DiskModel, FieldGrid, SlopeMode};
use thindisk::grid::{CartesianGrid, PolarGrid};
use thindisk::gridio::GridFile;
use thindisk::polar_kernels::{PolarKernel, PolarKernelTables};
use thindisk::solver::{
    exact_force_field, solve_cartesian_direct, solve_cartesian_with, solve_polar_direct, solve_polar_with, ForceField,
    SignConvention,
};
use thindisk::study::{
    cartesian_sweep, polar_sweep, self_convergence_sweep, softened_sweep, SweepOptions, TABLE_DISK_RADIUS,
    TABLE_PAIR_OFFSET,
};

use crate::config::Config;
use crate::{BenchArgs, CliError, ConvergeArgs, GridArgs, KernelArgs, ModelArgs, SingularArgs, SolveArgs};

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(format!("unknown value {s:?}; expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }
    };
}

named_enum!(Coords { Cartesian => "cartesian", Polar => "polar" });
named_enum!(ModelKind { D2 => "d2", D2Pair => "d2-pair", LogSpiral => "log-spiral", Uniform => "uniform" });
named_enum!(Method { Proposed => "proposed", Direct => "direct", Softening => "softening", Kalnajs => "kalnajs" });
named_enum!(SweepMethod { Proposed => "proposed", Softening => "softening", SelfConvergence => "self" });
named_enum!(Slopes { Auto => "auto", Analytic => "analytic", Difference => "difference" });
named_enum!(Convention { PaperLiteral => "paper-literal", PotentialGradient => "potential-gradient" });
named_enum!(TableFormat { Binary => "binary", Csv => "csv" });

impl From<Slopes> for SlopeMode {
    fn from(s: Slopes) -> Self {
        match s {
            Slopes::Auto => SlopeMode::Auto,
            Slopes::Analytic => SlopeMode::Analytic,
            Slopes::Difference => SlopeMode::Difference,
        }
    }
}

impl From<Convention> for SignConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::PaperLiteral => SignConvention::PaperLiteral,
            Convention::PotentialGradient => SignConvention::PotentialGradient,
        }
    }
}

fn model(a: &ModelArgs, cfg: &Config) -> Result<DiskModel, CliError> {
    let kind = cfg.pick(a.model, "model", ModelKind::D2)?;
    let alpha = cfg.pick(a.alpha, "alpha", TABLE_DISK_RADIUS)?;
    let sigma0 = cfg.pick(a.sigma0, "sigma0", 1.0)?;
    let m = match kind {
        ModelKind::D2 => DiskModel::d2(alpha, sigma0)?,
        ModelKind::D2Pair => DiskModel::d2_pair(alpha, sigma0, cfg.pick(a.offset, "offset", TABLE_PAIR_OFFSET)?)?,
        ModelKind::LogSpiral => DiskModel::LogSpiral,
        ModelKind::Uniform => DiskModel::Uniform(sigma0),
    };
    m.validate()?;
    Ok(m)
}

fn field_grid(a: &GridArgs, n: usize, cfg: &Config) -> Result<FieldGrid, CliError> {
    let hw = cfg.pick(a.half_width, "half-width", 1.0)?;
    Ok(match cfg.pick(a.coords, "coords", Coords::Cartesian)? {
        Coords::Cartesian => FieldGrid::Cartesian(CartesianGrid::new(hw, n)?),
        Coords::Polar => FieldGrid::Polar(PolarGrid::new(hw, n, cfg.pick(a.beta0, "beta0", 0.99)?)?),
    })
}

fn sweep_options(a: &GridArgs, slopes: Option<Slopes>, conv: Option<Convention>, cfg: &Config) -> Result<SweepOptions, CliError> {
    Ok(SweepOptions {
        half_width: cfg.pick(a.half_width, "half-width", 1.0)?,
        beta0: cfg.pick(a.beta0, "beta0", 0.99)?,
        slope_mode: cfg.pick(slopes, "slopes", Slopes::Auto)?.into(),
        convention: cfg.pick(conv, "convention", Convention::PaperLiteral)?.into(),
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(output: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => write_bytes(&p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_density(path: &Path) -> Result<DensityField, CliError> {
    let text = read_text(path)?;
    let file = GridFile::parse(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    file.into_density().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cartesian_tables(grid: &CartesianGrid, cache: Option<&Path>) -> Result<KernelTables, CliError> {
    if let Some(p) = cache.filter(|p| p.exists()) {
        let bytes = std::fs::read(p).map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
        if let CachedTables::Cartesian(t) = decode(&bytes)? {
            if t.grid() == grid {
                return Ok(t);
            }
        }
        eprintln!("kernel cache {} does not match this grid; rebuilding", p.display());
    }
    let t = KernelTables::tabulate(grid);
    if let Some(p) = cache {
        write_bytes(p, &encode_cartesian(&t))?;
    }
    Ok(t)
}

fn polar_tables(grid: &PolarGrid, cache: Option<&Path>) -> Result<PolarKernelTables, CliError> {
    if let Some(p) = cache.filter(|p| p.exists()) {
        let bytes = std::fs::read(p).map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
        if let CachedTables::Polar(t) = decode(&bytes)? {
            if t.grid() == grid {
                return Ok(t);
            }
        }
        eprintln!("kernel cache {} does not match this grid; rebuilding", p.display());
    }
    let t = PolarKernelTables::tabulate(grid);
    if let Some(p) = cache {
        write_bytes(p, &encode_polar(&t))?;
    }
    Ok(t)
}

fn norms_line(name: &str, n: &Norms) -> String {
    format!("{name:<6} E1 {:.4e}  E2 {:.4e}  Einf {:.4e}", n.l1, n.l2, n.linf)
}

fn check_finite(a: &Array2<f64>, what: &str) -> Result<(), CliError> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{what} contains non-finite values")))
    }
}

fn write_grid(dir: &Path, name: &str, grid: &FieldGrid, values: Array2<f64>) -> Result<(), CliError> {
    check_finite(&values, name)?;
    let path = dir.join(format!("{name}.txt"));
    write_bytes(&path, GridFile::from_array(grid.clone(), values).to_text().as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn solve(a: &SolveArgs, cfg: &Config) -> Result<(), CliError> {
    let method = cfg.pick(a.method, "method", Method::Proposed)?;
    let convention: SignConvention = cfg.pick(a.convention, "convention", Convention::PaperLiteral)?.into();
    let out_dir = cfg.pick(a.out_dir.clone(), "out-dir", PathBuf::from("."))?;
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let input = cfg.maybe(a.input.clone(), "input")?;
    let (field, truth) = match &input {
        Some(path) => (load_density(path)?, None),
        None => {
            let m = model(&a.model, cfg)?;
            let grid = field_grid(&a.grid, cfg.pick(a.n, "n", 64)?, cfg)?;
            let slopes = cfg.pick(a.slopes, "slopes", Slopes::Auto)?.into();
            (sample_density(&m, &grid, slopes)?, Some(m))
        }
    };
    let grid = field.grid().clone();
    if method == Method::Kalnajs {
        return solve_kalnajs(a, cfg, &grid, truth.as_ref(), &out_dir);
    }
    let cache = cfg.maybe(a.kernel_cache.clone(), "kernel-cache")?;
    let force = match (&grid, method) {
        (FieldGrid::Cartesian(g), Method::Proposed) => solve_cartesian_with(&field, &cartesian_tables(g, cache.as_deref())?, convention)?,
        (FieldGrid::Polar(g), Method::Proposed) => solve_polar_with(&field, &polar_tables(g, cache.as_deref())?, convention)?,
        (FieldGrid::Cartesian(g), Method::Direct) => {
            solve_cartesian_direct(&field, &cartesian_tables(g, cache.as_deref())?)?.with_convention(convention)
        }
        (FieldGrid::Polar(g), Method::Direct) => {
            solve_polar_direct(&field, &polar_tables(g, cache.as_deref())?)?.with_convention(convention)
        }
        (FieldGrid::Cartesian(_), Method::Softening) => {
            let sc = SofteningConfig { epsilon: cfg.maybe(a.epsilon, "epsilon")?, ..SofteningConfig::default() };
            solve_softened_cartesian(&field, &sc)?.with_convention(convention)
        }
        (FieldGrid::Polar(_), Method::Softening) => {
            return Err(CliError::Usage("the softening baseline needs --coords cartesian".into()))
        }
        (_, Method::Kalnajs) => unreachable!(),
    };
    write_force(&force, &out_dir)?;
    if let Some(exact) = truth.as_ref().and_then(|m| exact_force_field(m, &grid, convention)) {
        report_norms(&force, &exact)?;
    }
    Ok(())
}

fn write_force(force: &ForceField, dir: &Path) -> Result<(), CliError> {
    let grid = force.grid();
    let [a, b] = force.components();
    if force.is_polar() {
        write_grid(dir, "FR", grid, a.clone())?;
        write_grid(dir, "Ftheta", grid, b.clone())
    } else {
        write_grid(dir, "Fx", grid, a.clone())?;
        write_grid(dir, "Fy", grid, b.clone())?;
        write_grid(dir, "FR", grid, force.radial())
    }
}

fn report_norms(force: &ForceField, exact: &ForceField) -> Result<(), CliError> {
    let [n0, n1] = error_norms(force, exact)?;
    let [c0, c1] = force.component_names();
    println!("{}", norms_line(c0, &n0));
    println!("{}", norms_line(c1, &n1));
    if !force.is_polar() {
        println!("{}", norms_line("R", &radial_error_norms(force, exact)?));
    }
    Ok(())
}

fn solve_kalnajs(a: &SolveArgs, cfg: &Config, grid: &FieldGrid, truth: Option<&DiskModel>, dir: &Path) -> Result<(), CliError> {
    let m = match truth {
        Some(m @ (DiskModel::D2(_) | DiskModel::Uniform(_))) => *m,
        Some(_) => return Err(CliError::Usage("the Kalnajs baseline needs an axisymmetric model (d2 or uniform)".into())),
        None => return Err(CliError::Usage("the Kalnajs baseline works from a model, not an input grid".into())),
    };
    let d = KalnajsConfig::default();
    let kc = KalnajsConfig {
        u_min: cfg.pick(a.kalnajs.u_min, "u-min", d.u_min)?,
        alpha_max: cfg.pick(a.kalnajs.alpha_max, "alpha-max", d.alpha_max)?,
        n_alpha: cfg.pick(a.kalnajs.n_alpha, "n-alpha", d.n_alpha)?,
        n_u: cfg.pick(a.kalnajs.n_u, "n-u", d.n_u)?,
        m: 0,
    };
    let radius = |i: usize, j: usize| match grid {
        FieldGrid::Cartesian(g) => g.centers()[i].hypot(g.centers()[j]),
        FieldGrid::Polar(g) => g.radial_centers()[i],
    };
    let n = grid.n();
    let radii: Vec<f64> = (0..n * n).map(|k| radius(k / n, k % n)).collect();
    let phi = kalnajs_potential_axisym(|r| m.density(r, 0.0), &radii, &kc)?;
    let phi = Array2::from_shape_vec((n, n), phi).expect("square grid");
    if let Some(exact) = radii.iter().map(|&r| m.exact_potential(r, 0.0)).collect::<Option<Vec<f64>>>() {
        let cut = kc.u_min.exp();
        let (mut all, mut outside) = (0.0f64, 0.0f64);
        for ((p, q), r) in phi.iter().zip(&exact).zip(&radii) {
            all = all.max((p - q).abs());
            if *r >= cut {
                outside = outside.max((p - q).abs());
            }
        }
        println!("Phi    max abs error {all:.4e}  (r >= {cut:.3e}: {outside:.4e})");
    }
    write_grid(dir, "Phi", grid, phi)
}

pub fn converge(a: &ConvergeArgs, cfg: &Config) -> Result<(), CliError> {
    let m = model(&a.model, cfg)?;
    let ns = cfg.list(a.n.clone(), "n", &[32, 64, 128, 256])?;
    let opts = sweep_options(&a.grid, a.slopes, a.convention, cfg)?;
    let coords = cfg.pick(a.grid.coords, "coords", Coords::Cartesian)?;
    let method = cfg.pick(a.method, "method", SweepMethod::Proposed)?;
    let report = match (method, coords) {
        (SweepMethod::Proposed, Coords::Cartesian) => cartesian_sweep(&m, &ns, &opts)?,
        (SweepMethod::Proposed, Coords::Polar) => polar_sweep(&m, &ns, &opts)?,
        (SweepMethod::Softening, Coords::Cartesian) => {
            let sc = SofteningConfig { epsilon: cfg.maybe(a.epsilon, "epsilon")?, ..SofteningConfig::default() };
            softened_sweep(&m, &ns, &opts, &sc)?
        }
        (SweepMethod::SelfConvergence, Coords::Cartesian) => {
            self_convergence_sweep(&m, &ns, cfg.pick(a.reference_n, "reference-n", 512)?, &opts)?
        }
        (_, Coords::Polar) => return Err(CliError::Usage("this sweep needs --coords cartesian".into())),
    };
    emit(cfg.maybe(a.output.clone(), "output")?, &report.to_csv())
}

pub fn bench(a: &BenchArgs, cfg: &Config) -> Result<(), CliError> {
    let m = model(&a.model, cfg)?;
    let ns = cfg.list(a.n.clone(), "n", &[128, 256, 512])?;
    let methods = cfg.list(a.methods.clone(), "methods", &[BenchMethod::Proposed, BenchMethod::Direct])?;
    let reps = cfg.pick(a.repetitions, "repetitions", 40)?;
    if reps < 3 {
        return Err(CliError::Usage(format!("at least 3 repetitions are needed, got {reps}")));
    }
    let hw = cfg.pick(a.half_width, "half-width", 1.0)?;
    let records = run_bench(&methods, &m, &ns, hw, reps)?;
    emit(cfg.maybe(a.output.clone(), "output")?, &records_to_csv(&records))
}

pub fn kernels(a: &KernelArgs, cfg: &Config) -> Result<(), CliError> {
    let n = cfg.pick(a.n, "n", 64)?;
    let grid = field_grid(&a.grid, n, cfg)?;
    let format = cfg.pick(a.format, "format", TableFormat::Binary)?;
    let output = cfg.maybe(a.output.clone(), "output")?;
    match format {
        TableFormat::Binary => {
            let path = output.ok_or_else(|| CliError::Usage("binary kernel dumps need --output".into()))?;
            let bytes = match &grid {
                FieldGrid::Cartesian(g) => encode_cartesian(&KernelTables::tabulate(g)),
                FieldGrid::Polar(g) => encode_polar(&PolarKernelTables::tabulate(g)),
            };
            write_bytes(&path, &bytes)?;
            println!("wrote {} ({} bytes)", path.display(), bytes.len());
            Ok(())
        }
        TableFormat::Csv => emit(output, &tables_csv(&grid)),
    }
}

fn tables_csv(grid: &FieldGrid) -> String {
    let mut s = String::from("kernel,di,dj,value\n");
    match grid {
        FieldGrid::Cartesian(g) => {
            let t = KernelTables::tabulate(g);
            for k in CartesianKernel::ALL {
                for ((r, c), v) in t.table(k).indexed_iter() {
                    let _ = writeln!(s, "{},{},{},{v:?}", k.name(), unwrap_offset(r, 2 * g.n()), unwrap_offset(c, 2 * g.n()));
                }
            }
        }
        FieldGrid::Polar(g) => {
            let t = PolarKernelTables::tabulate(g);
            for k in PolarKernel::ALL {
                for ((r, c), v) in t.table(k).indexed_iter() {
                    let _ = writeln!(s, "{},{},{},{v:?}", k.name(), unwrap_offset(r, 2 * g.n()), unwrap_offset(c, g.n()));
                }
            }
            // hole rows carry the field radius index in place of a radial offset
            for k in PolarKernel::ALL {
                for ((i, c), v) in t.hole_table(k).indexed_iter() {
                    let _ = writeln!(s, "hole-{},{i},{},{v:?}", k.name(), unwrap_offset(c, g.n()));
                }
            }
        }
    }
    s
}

pub fn singular_study(a: &SingularArgs, cfg: &Config) -> Result<(), CliError> {
    let ks = cfg.list(a.k.clone(), "k", &(2..=10).collect::<Vec<u32>>())?;
    let rows = singular_trapezoid_study(&ks)?;
    let mut s = String::from("k,theta,error,order\n");
    for r in rows {
        let order = r.order.map(|o| format!("{o:?}")).unwrap_or_default();
        let _ = writeln!(s, "{},{:?},{:?},{order}", r.k, r.theta, r.error);
    }
    emit(cfg.maybe(a.output.clone(), "output")?, &s)
}
