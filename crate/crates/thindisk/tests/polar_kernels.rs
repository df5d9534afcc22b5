use proptest::prelude::*;

use thindisk::grid::PolarGrid;
use thindisk::polar_kernels::{
    azimuthal_deviation, eval_hole_kernel, eval_polar_kernel, hole_limits, kernel_on_cell, kernel_quadrature,
    regular_limits, select_azimuthal_forms, AzimuthalForm, PolarKernel, PolarKernelTables,
};


fn relative_residual(kind: PolarKernel, di: i64, dj: i64, grid: &PolarGrid) -> f64 {
    let lim = regular_limits(di, dj, grid);
    let v = kernel_on_cell(kind, &lim, AzimuthalForm::Derived).unwrap();
    let q = kernel_quadrature(kind, &lim);
    ((v - q) / q).abs()
}

#[test]
fn radial_kernel_at_small_offset_is_within_trapezoid_error() {
    let g = PolarGrid::new(1.0, 16, 0.99).unwrap();
    // two-node trapezoid over one cell of width Δθ ≈ 0.39
    assert!(relative_residual(PolarKernel::R0, 2, 3, &g) < 0.05);
}

#[test]
fn trapezoid_kernels_converge_at_a_fixed_source_location() {
    for kind in [PolarKernel::R0, PolarKernel::RR] {
        let mut prev = f64::INFINITY;
        for n in [16usize, 32, 64, 128] {
            let g = PolarGrid::new(1.0, n, 0.99).unwrap();
            let k = (n / 16) as i64;
            let r = relative_residual(kind, 2 * k, 3 * k, &g);
            assert!(r < prev / 2.0, "{kind:?} at N = {n}: {r} after {prev}");
            prev = r;
        }
    }
}

#[test]
fn weighted_trapezoid_kernels_approach_three_times_the_integral() {
    // Two nodes at ±h/2 weight a linear moment by h²/4 instead of h²/12.
    for kind in [PolarKernel::RTheta, PolarKernel::ThetaTheta] {
        let g = PolarGrid::new(1.0, 128, 0.99).unwrap();
        let lim = regular_limits(16, 24, &g);
        let ratio = kernel_on_cell(kind, &lim, AzimuthalForm::Derived).unwrap() / kernel_quadrature(kind, &lim);
        assert!((ratio - 3.0).abs() < 0.01, "{kind:?}: {ratio}");
    }
}

#[test]
fn printed_azimuthal_forms_fail_the_oracle_and_are_replaced() {
    let g = PolarGrid::new(1.0, 32, 0.99).unwrap();
    for kind in [PolarKernel::Theta0, PolarKernel::ThetaR, PolarKernel::ThetaTheta] {
        assert!(azimuthal_deviation(kind, AzimuthalForm::Printed, &g) > 1.0, "{kind:?}");
    }
    assert_eq!(select_azimuthal_forms(&g), [AzimuthalForm::Derived; 3]);
    assert_eq!(PolarKernelTables::tabulate(&g).azimuthal_forms(), [AzimuthalForm::Derived; 3]);
}

#[test]
fn hole_kernels_follow_the_oracle() {
    let g = PolarGrid::new(1.0, 32, 0.99).unwrap();
    for kind in [PolarKernel::Theta0, PolarKernel::ThetaR] {
        for (i, dj) in [(0usize, 1i64), (3, 5), (31, -7)] {
            let lim = hole_limits(i, dj, &g);
            let v = eval_hole_kernel(kind, i, dj, &g).unwrap();
            let q = kernel_quadrature(kind, &lim);
            assert!((v - q).abs() <= 1e-9 * q.abs().max(1e-6), "{kind:?} ({i}, {dj}): {v} vs {q}");
        }
    }
}

#[test]
fn out_of_range_offsets_are_rejected() {
    let g = PolarGrid::new(1.0, 16, 0.99).unwrap();
    assert!(eval_polar_kernel(PolarKernel::R0, 16, 0, &g).is_err());
    assert!(eval_hole_kernel(PolarKernel::R0, 16, 0, &g).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_azimuthal_kernels_match_quadrature(n in prop::sample::select(vec![8usize, 16, 32, 64]), fi in -1.0f64..1.0, fj in 0.0f64..1.0, radial in any::<bool>()) {
        let g = PolarGrid::new(1.0, n, 0.99).unwrap();
        let di = (fi * (n - 1) as f64).round() as i64;
        let dj = (fj * (n - 1) as f64).round() as i64;
        prop_assume!((di, dj) != (0, 0));
        let kind = if radial { PolarKernel::ThetaR } else { PolarKernel::Theta0 };
        let lim = regular_limits(di, dj, &g);
        let v = kernel_on_cell(kind, &lim, AzimuthalForm::Derived).unwrap();
        let q = kernel_quadrature(kind, &lim);
        let err = (v - q).abs();
        prop_assert!(err <= 1e-8 * q.abs() || err <= 1e-12, "{kind:?} ({di}, {dj}): {v} vs {q}");
    }

    #[test]
    fn kernels_mirror_in_angle(n in prop::sample::select(vec![8usize, 16, 32]), fi in -1.0f64..1.0, fj in 0.0f64..1.0) {
        let g = PolarGrid::new(1.0, n, 0.99).unwrap();
        let t = PolarKernelTables::tabulate(&g);
        let di = (fi * (n - 1) as f64).round() as i64;
        let dj = (fj * (n - 1) as f64).round() as i64;
        prop_assume!(2 * dj != n as i64);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * (a.abs() + b.abs()).max(1e-9);
        // even in the angular offset: R0, RR, Thetatheta; odd: RTheta, Theta0, ThetaR
        for (k, parity) in [
            (PolarKernel::R0, 1.0),
            (PolarKernel::RR, 1.0),
            (PolarKernel::RTheta, -1.0),
            (PolarKernel::Theta0, -1.0),
            (PolarKernel::ThetaR, -1.0),
            (PolarKernel::ThetaTheta, 1.0),
        ] {
            prop_assert!(close(t.get(k, di, -dj), parity * t.get(k, di, dj)), "{:?} ({}, {})", k, di, dj);
        }
    }
}
