use std::path::Path;
use std::process::{Command, Output};

use thindisk::analysis::ConvergenceReport;
use thindisk::bench::records_from_csv;
use thindisk::cache::{decode, CachedTables};
use thindisk::gridio::GridFile;

fn thindisk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thindisk"))
        .args(args)
        .current_dir(dir)
        .env_remove("THINDISK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn norm(out: &str, component: &str, col: &str) -> f64 {
    let line = out.lines().find(|l| l.split_whitespace().next() == Some(component)).unwrap();
    let mut it = line.split_whitespace();
    it.position(|w| w == col).unwrap();
    it.next().unwrap().parse().unwrap()
}

#[test]
fn polar_solve_prints_the_radial_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["solve", "--coords", "polar", "--model", "d2", "--N", "32", "--beta0", "0.99"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let e1 = norm(&stdout(&o), "r", "E1");
    assert!((e1 - 1.603e-1).abs() < 1e-3, "{e1}");
    for f in ["FR.txt", "Ftheta.txt"] {
        let g = GridFile::parse(&std::fs::read_to_string(dir.path().join(f)).unwrap()).unwrap();
        assert_eq!(g.grid.n(), 32);
    }
}

#[test]
fn cartesian_solve_writes_three_components() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["solve", "--coords", "cartesian", "--model", "d2", "--alpha", "0.25", "--N", "16", "--out-dir", "out"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    for c in ["x", "y", "R"] {
        assert!(norm(&out, c, "E1") > 0.0);
    }
    for f in ["Fx.txt", "Fy.txt", "FR.txt"] {
        assert!(dir.path().join("out").join(f).exists());
    }
}

#[test]
fn solving_a_written_density_reproduces_the_model_solve() {
    let dir = tempfile::tempdir().unwrap();
    let model = thindisk::density::DiskModel::d2(0.5, 1.0).unwrap();
    let grid = thindisk::grid::CartesianGrid::new(1.0, 16).unwrap();
    let f = thindisk::density::sample_cartesian(&model, &grid, thindisk::density::SlopeMode::Analytic).unwrap();
    std::fs::write(dir.path().join("sigma.txt"), GridFile::from_density(&f, true).to_text()).unwrap();
    assert!(thindisk(&["solve", "--input", "sigma.txt", "--out-dir", "a"], dir.path()).status.success());
    assert!(thindisk(&["solve", "--N", "16", "--out-dir", "b"], dir.path()).status.success());
    let read = |p: &str| std::fs::read_to_string(dir.path().join(p)).unwrap();
    assert_eq!(read("a/Fx.txt"), read("b/Fx.txt"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = thindisk(&["solve", "--input", "absent.txt"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("absent.txt"));
    std::fs::write(dir.path().join("bad.txt"), "thindisk v1\ncart 2 1\n1,2\n").unwrap();
    assert_eq!(thindisk(&["solve", "--input", "bad.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(thindisk(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(thindisk(&["solve", "--N", "0"], dir.path()).status.code(), Some(1));
    assert_eq!(thindisk(&["solve", "--coords", "polar", "--method", "softening", "--N", "8"], dir.path()).status.code(), Some(1));
    assert_eq!(thindisk(&["bench", "--repetitions", "2"], dir.path()).status.code(), Some(1));
    assert_eq!(thindisk(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "coords = polar\nN = 8\nout_dir = from-config\n").unwrap();
    let o = thindisk(&["--config", "run.cfg", "solve"], dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("from-config/Ftheta.txt").exists());
    let o = thindisk(&["--config", "run.cfg", "solve", "--coords", "cartesian", "--out-dir", "flags"], dir.path());
    assert!(o.status.success());
    let g = GridFile::parse(&std::fs::read_to_string(dir.path().join("flags/Fx.txt")).unwrap()).unwrap();
    assert_eq!(g.grid.n(), 8);
}

#[test]
fn threads_from_flag_or_environment() {
    let dir = tempfile::tempdir().unwrap();
    assert!(thindisk(&["--threads", "2", "singular-study", "--k", "2"], dir.path()).status.success());
    assert_eq!(thindisk(&["--threads", "0", "singular-study"], dir.path()).status.code(), Some(1));
    let bad = Command::new(env!("CARGO_BIN_EXE_thindisk"))
        .args(["singular-study"])
        .env("THINDISK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn converge_emits_a_parseable_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["converge", "--N", "32,64", "--output", "d2.csv"], dir.path());
    assert!(o.status.success());
    let r = ConvergenceReport::from_csv(&std::fs::read_to_string(dir.path().join("d2.csv")).unwrap()).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!((r.norms("x", 32).unwrap().l1 - 1.1559e-2).abs() < 1e-5);
    let order = r.order("x", 32, 64).unwrap()[0];
    assert!((1.7..=2.0).contains(&order));
}

#[test]
fn bench_emits_timings() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["bench", "--N", "16,32", "--methods", "proposed,softening", "--repetitions", "3"], dir.path());
    assert!(o.status.success());
    let records = records_from_csv(&stdout(&o)).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3);
    assert!(records.iter().all(|r| r.mean_seconds > 0.0 && r.repetitions == 3));
}

#[test]
fn kernel_dump_is_a_reusable_cache() {
    let dir = tempfile::tempdir().unwrap();
    assert!(thindisk(&["kernels", "--coords", "polar", "--N", "8", "--output", "k.bin"], dir.path()).status.success());
    let bytes = std::fs::read(dir.path().join("k.bin")).unwrap();
    assert!(matches!(decode(&bytes).unwrap(), CachedTables::Polar(_)));
    let cached = thindisk(&["solve", "--coords", "polar", "--N", "8", "--kernel-cache", "k.bin", "--out-dir", "a"], dir.path());
    let fresh = thindisk(&["solve", "--coords", "polar", "--N", "8", "--out-dir", "b"], dir.path());
    assert!(cached.status.success() && fresh.status.success());
    let read = |p: &str| std::fs::read_to_string(dir.path().join(p)).unwrap();
    assert_eq!(read("a/FR.txt"), read("b/FR.txt"));
    let csv = thindisk(&["kernels", "--N", "4", "--format", "csv"], dir.path());
    assert_eq!(stdout(&csv).lines().count(), 1 + 6 * 8 * 8);
}

#[test]
fn singular_study_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["singular-study", "--k", "2,3"], dir.path());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,theta,error,order");
    let e2: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((e2 - 0.998).abs() < 1e-3);
    assert!(lines[2].split(',').nth(3).unwrap().parse::<f64>().is_ok());
}

#[test]
fn kalnajs_needs_an_axisymmetric_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = thindisk(&["solve", "--method", "kalnajs", "--model", "d2-pair", "--N", "8"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = thindisk(&["solve", "--method", "kalnajs", "--coords", "polar", "--N", "8", "--n-alpha", "64", "--n-u", "64"], dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("Phi.txt").exists());
}
