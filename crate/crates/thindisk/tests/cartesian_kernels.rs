use proptest::prelude::*;

use thindisk::cartesian_kernels::{eval_cartesian_kernel, CartesianKernel, KernelTables};
use thindisk::grid::CartesianGrid;
use thindisk::quadrature::integrate_2d;

use CartesianKernel::*;

fn integrand(kind: CartesianKernel, a: f64, b: f64, di: i64, dj: i64, dx: f64) -> f64 {
    let r3 = (a * a + b * b).powf(1.5);
    let (wx, wy) = (a + di as f64 * dx, b + dj as f64 * dx);
    match kind {
        X0 => a / r3,
        XX => a * wx / r3,
        XY => a * wy / r3,
        Y0 => b / r3,
        YX => b * wx / r3,
        YY => b * wy / r3,
    }
}

fn quadrature(kind: CartesianKernel, di: i64, dj: i64, dx: f64) -> f64 {
    let a = ((-di as f64 - 0.5) * dx, (-di as f64 + 0.5) * dx);
    let b = ((-dj as f64 - 0.5) * dx, (-dj as f64 + 0.5) * dx);
    integrate_2d(|x, y| integrand(kind, x, y, di, dj, dx), a, b, 1e-18, 1e-13)
}

fn kind() -> impl Strategy<Value = CartesianKernel> {
    prop::sample::select(CartesianKernel::ALL.to_vec())
}

#[test]
fn neighbour_of_small_grid_matches_quadrature() {
    let g = CartesianGrid::new(1.0, 8).unwrap();
    let v = eval_cartesian_kernel(X0, 1, 0, &g).unwrap();
    let q = quadrature(X0, 1, 0, g.spacing());
    assert!(((v - q) / q).abs() < 1e-8, "{v} vs {q}");
}

#[test]
fn self_cell_values_vanish_by_symmetry() {
    let g = CartesianGrid::new(1.0, 16).unwrap();
    for k in [X0, Y0, XY, YX] {
        assert_eq!(eval_cartesian_kernel(k, 0, 0, &g).unwrap(), 0.0, "{k:?}");
    }
}

#[test]
fn offsets_beyond_the_table_are_rejected() {
    let g = CartesianGrid::new(1.0, 8).unwrap();
    assert!(eval_cartesian_kernel(XX, 9, 0, &g).is_err());
    assert!(eval_cartesian_kernel(XX, 0, -9, &g).is_err());
}

#[test]
fn tables_agree_with_pointwise_evaluation() {
    let g = CartesianGrid::new(2.0, 16).unwrap();
    let t = KernelTables::tabulate(&g);
    for k in CartesianKernel::ALL {
        for di in -15..=16 {
            for dj in -15..=16 {
                let want = eval_cartesian_kernel(k, di, dj, &g).unwrap();
                assert!((t.get(k, di, dj) - want).abs() <= 1e-15 * want.abs().max(1e-3), "{k:?} ({di}, {dj})");
            }
        }
    }
}

#[test]
fn zero_kernels_scale_with_grid_independently_of_size() {
    // The unweighted kernels are dimensionless; weighted ones scale with Δx.
    let a = CartesianGrid::new(1.0, 16).unwrap();
    let b = CartesianGrid::new(3.0, 16).unwrap();
    for (di, dj) in [(1, 2), (-5, 7), (15, -3)] {
        let ratio = |k| eval_cartesian_kernel(k, di, dj, &b).unwrap() / eval_cartesian_kernel(k, di, dj, &a).unwrap();
        assert!((ratio(X0) - 1.0).abs() < 1e-12);
        assert!((ratio(XY) - 3.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_quadrature(n in prop::sample::select(vec![8usize, 16, 32, 64]), fi in -1.0f64..1.0, fj in -1.0f64..1.0, k in kind()) {
        let g = CartesianGrid::new(1.0, n).unwrap();
        let lim = (n - 1) as f64;
        let (di, dj) = ((fi * lim).round() as i64, (fj * lim).round() as i64);
        prop_assume!((di, dj) != (0, 0));
        let v = eval_cartesian_kernel(k, di, dj, &g).unwrap();
        let q = quadrature(k, di, dj, g.spacing());
        let err = (v - q).abs();
        prop_assert!(err <= 1e-8 * q.abs() || err <= 1e-12, "{k:?} ({di}, {dj}): {v} vs {q}");
    }

    #[test]
    fn parity_and_axis_swap(n in prop::sample::select(vec![8usize, 16, 32]), fi in -1.0f64..1.0, fj in -1.0f64..1.0) {
        let g = CartesianGrid::new(1.0, n).unwrap();
        let t = KernelTables::tabulate(&g);
        let lim = (n - 1) as f64;
        let (di, dj) = ((fi * lim).round() as i64, (fj * lim).round() as i64);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-13;
        for (k, pi, pj) in [(X0, -1.0, 1.0), (XX, 1.0, 1.0), (XY, -1.0, -1.0), (Y0, 1.0, -1.0), (YX, -1.0, -1.0), (YY, 1.0, 1.0)] {
            let v = t.get(k, di, dj);
            prop_assert!(close(t.get(k, -di, dj), pi * v), "{:?} di parity", k);
            prop_assert!(close(t.get(k, di, -dj), pj * v), "{:?} dj parity", k);
        }
        prop_assert!(close(t.get(Y0, di, dj), t.get(X0, dj, di)));
        prop_assert!(close(t.get(YY, di, dj), t.get(XX, dj, di)));
        prop_assert!(close(t.get(YX, di, dj), t.get(XY, dj, di)));
    }
}
