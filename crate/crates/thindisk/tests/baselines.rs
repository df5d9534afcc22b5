use std::f64::consts::PI;

use num_complex::Complex64;

use thindisk::analysis::difference_norms;
use thindisk::baselines::{
    kalnajs_gamma_kernel, kalnajs_potential_axisym, ln_gamma, point_mass_force, solve_softened_cartesian, ForceRoute,
    KalnajsConfig, SoftenedKernel, SofteningConfig,
};
use thindisk::density::{sample_cartesian, sample_polar, D2Disk, DiskModel, SlopeMode};
use thindisk::grid::{CartesianGrid, PolarGrid};
use thindisk::study::{softened_sweep, table_disk, SweepOptions};

#[test]
fn gamma_at_known_points() {
    let g = |re: f64, im: f64| ln_gamma(Complex64::new(re, im));
    assert!((g(5.0, 0.0).re - 24f64.ln()).abs() < 1e-13);
    assert!((g(0.5, 0.0).re - 0.5 * PI.ln()).abs() < 1e-13);
    assert!((g(0.25, 0.0).re - 3.625_609_908_221_908_f64.ln()).abs() < 1e-13);
    for y in [0.3, 1.0, 7.5] {
        // |Γ(iy)|² = π / (y sinh πy)
        let want = 0.5 * (PI / (y * (PI * y).sinh())).ln();
        assert!((g(0.0, y).re - want).abs() < 1e-12, "y={y}");
    }
}

#[test]
fn kalnajs_kernel_oracles() {
    // ½ Γ(1/4)² / Γ(3/4)²
    assert!((kalnajs_gamma_kernel(0.0, 0).unwrap() - 4.376_879_230_452_959).abs() < 1e-12);
    // large-α decay K ~ 1/|α|
    let a = 500.0;
    assert!((kalnajs_gamma_kernel(a, 0).unwrap() * a - 1.0).abs() < 1e-4);
}

#[test]
fn kalnajs_matches_d2_potential() {
    let d = D2Disk::new(0.5, 1.0).unwrap();
    let radii = [0.1, 0.25, 0.4, 0.6, 0.9];
    let cfg = KalnajsConfig::default();
    let phi = kalnajs_potential_axisym(|r| d.density(r), &radii, &cfg).unwrap();
    // the error is the potential of the mass cut out below r = e^{u_min}
    let hole_mass = PI * (2.0 * cfg.u_min).exp();
    for (r, p) in radii.iter().zip(phi) {
        let want = d.potential(*r).unwrap();
        assert!((p - want).abs() <= 1.2 * hole_mass / r, "r={r}: {p} vs {want}");
    }
}

#[test]
fn deeper_cutoff_shrinks_inner_error() {
    let d = D2Disk::new(0.5, 1.0).unwrap();
    let r = 0.06;
    let want = d.potential(r).unwrap();
    let errs: Vec<f64> = [-3.0, -5.0, -7.0]
        .iter()
        .map(|&u_min| {
            let cfg = KalnajsConfig { u_min, ..Default::default() };
            (kalnajs_potential_axisym(|r| d.density(r), &[r], &cfg).unwrap()[0] - want).abs()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn kalnajs_rejects_bad_input() {
    let cfg = KalnajsConfig::default();
    assert!(kalnajs_potential_axisym(|_| 1.0, &[0.0], &cfg).is_err());
    assert!(kalnajs_potential_axisym(|_| 1.0, &[0.5], &KalnajsConfig { m: 2, ..cfg }).is_err());
    assert!(kalnajs_potential_axisym(|_| 1.0, &[0.5], &KalnajsConfig { u_min: 1.0, ..cfg }).is_err());
}

#[test]
fn softened_table_row_at_32() {
    let r = softened_sweep(&table_disk(), &[32], &SweepOptions::default(), &SofteningConfig::default()).unwrap();
    let x = r.norms("x", 32).unwrap();
    for (got, want) in [(x.l1, 0.4293), (x.l2, 0.5116), (x.linf, 0.9981)] {
        assert!((got - want).abs() <= 1e-4, "{got} vs {want}");
    }
}

#[test]
fn kernel_gradient_tends_to_point_masses() {
    let g = CartesianGrid::new(1.0, 32).unwrap();
    let f = sample_cartesian(&table_disk(), &g, SlopeMode::Auto).unwrap();
    let bare = point_mass_force(&f).unwrap();
    let areas = g.cell_area() * ndarray::Array2::<f64>::ones((32, 32));
    let mut prev = f64::INFINITY;
    for k in [1.0, 4.0, 16.0, 64.0] {
        let cfg = SofteningConfig { epsilon: Some(g.spacing() / k), route: ForceRoute::KernelGradient };
        let soft = solve_softened_cartesian(&f, &cfg).unwrap();
        let e = difference_norms(&soft.components()[0], &bare.components()[0], &areas).unwrap().linf;
        assert!(e < prev);
        prev = e;
    }
    assert!(prev < 1e-3);
}

#[test]
fn reusable_kernel_matches_one_shot_solve() {
    let g = CartesianGrid::new(1.0, 16).unwrap();
    let f = sample_cartesian(&DiskModel::d2_pair(0.5, 1.0, 0.25).unwrap(), &g, SlopeMode::Auto).unwrap();
    let k = SoftenedKernel::new(&g, g.spacing()).unwrap();
    assert_eq!(k.epsilon(), g.spacing());
    assert_eq!(k.force(&f).unwrap(), solve_softened_cartesian(&f, &SofteningConfig::default()).unwrap());
    assert!(SoftenedKernel::new(&g, -1.0).is_err());
    assert!(SofteningConfig::with_epsilon(0.0).is_err());
}

#[test]
fn polar_fields_are_rejected() {
    let f = sample_polar(&table_disk(), &PolarGrid::new(1.0, 8, 0.99).unwrap(), SlopeMode::Auto).unwrap();
    assert!(solve_softened_cartesian(&f, &SofteningConfig::default()).is_err());
    assert!(point_mass_force(&f).is_err());
}
