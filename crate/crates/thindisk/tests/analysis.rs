use ndarray::Array2;
use proptest::prelude::*;

use thindisk::analysis::{
    difference_norms, four_closest_average, order_of_accuracy, restrict_fine_to_coarse, singular_integral,
    singular_trapezoid_study, ConvergenceReport, Norms,
};
use thindisk::density::FieldGrid;
use thindisk::grid::CartesianGrid;
use thindisk::solver::{ForceField, SignConvention};

/// Composite Simpson after `x = θs²`, which removes the log singularity at 0.
fn simpson_oracle(theta: f64) -> f64 {
    let m = 20_000;
    let h = 1.0 / m as f64;
    let f = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let x = theta * s * s;
        let h = (0.5 * x).sin();
        (2.0 * h * h).ln() * 2.0 * theta * s
    };
    let mut sum = f(0.0) + f(1.0);
    for k in 1..m {
        sum += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * sum * h / 3.0
}

#[test]
fn singular_integral_matches_substituted_simpson() {
    for theta in [0.25, 0.5, 1.0, 2f64.powi(-8)] {
        let a = singular_integral(theta);
        let b = simpson_oracle(theta);
        assert!((a - b).abs() < 1e-7 * b.abs(), "θ={theta}: {a} vs {b}");
    }
}

#[test]
fn trapezoid_error_tends_to_four_theta() {
    let rows = singular_trapezoid_study(&(2..=10).collect::<Vec<_>>()).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows[0].order.is_none());
    for r in &rows[1..] {
        assert!((r.order.unwrap() - 1.0).abs() < 0.01);
    }
    let last = rows.last().unwrap();
    assert!((last.error / (4.0 * last.theta) - 1.0).abs() < 1e-4);
    assert!(singular_trapezoid_study(&[1]).is_err());
}

#[test]
fn order_of_accuracy_basics() {
    assert_eq!(order_of_accuracy(4.0, 1.0).unwrap(), 2.0);
    assert!((order_of_accuracy(1.1559e-2, 3.0e-3).unwrap() - 1.946).abs() < 1e-3);
    assert!(order_of_accuracy(0.0, 1.0).is_err());
    assert!(order_of_accuracy(1.0, -1.0).is_err());
}

#[test]
fn norms_reject_shape_mismatch() {
    let a = Array2::zeros((3, 3));
    assert!(difference_norms(&a, &Array2::zeros((3, 4)), &a).is_err());
}

#[test]
fn four_closest_average_picks_center_cells() {
    let fine = Array2::from_shape_fn((8, 8), |(i, j)| (i * 8 + j) as f64);
    let c = four_closest_average(&fine, 2).unwrap();
    // coarse cell 0 covers fine 0..4; its center sits between fine 1 and 2
    assert_eq!(c[[0, 0]], 0.25 * (9.0 + 10.0 + 17.0 + 18.0));
    assert!(four_closest_average(&fine, 3).is_err());
    assert!(four_closest_average(&fine, 8).is_err());
}

#[test]
fn restriction_averages_children() {
    let g = CartesianGrid::new(1.0, 4).unwrap();
    let a = Array2::from_shape_fn((4, 4), |(i, j)| (i + 10 * j) as f64);
    let f = ForceField::new(FieldGrid::Cartesian(g), [a.clone(), -a], SignConvention::PaperLiteral).unwrap();
    let c = restrict_fine_to_coarse(&f).unwrap();
    assert_eq!(c.grid().n(), 2);
    assert_eq!(c.components()[0][[1, 0]], 0.25 * (2.0 + 3.0 + 12.0 + 13.0));
    assert_eq!(c.components()[1][[1, 0]], -0.25 * (2.0 + 3.0 + 12.0 + 13.0));
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(ConvergenceReport::from_csv("").is_err());
    assert!(ConvergenceReport::from_csv("M,x_E1\n").is_err());
    assert!(ConvergenceReport::from_csv("N,x_E1,x_E2,x_Einf,x_O1,x_O2,x_Oinf\n8,1,2\n").is_err());
}

fn report_from(rows: &[(usize, [f64; 6])]) -> ConvergenceReport {
    let mut r = ConvergenceReport::new("proposed-cartesian", "d2", &["x", "y"]);
    for (n, v) in rows {
        r.push(*n, vec![Norms { l1: v[0], l2: v[1], linf: v[2] }, Norms { l1: v[3], l2: v[4], linf: v[5] }]).unwrap();
    }
    r.set_meta("half_width", 1.0);
    r
}

proptest! {
    #[test]
    fn norms_are_homogeneous(seed in prop::collection::vec(-10.0f64..10.0, 16), c in -5.0f64..5.0) {
        let a = Array2::from_shape_vec((4, 4), seed).unwrap();
        let z = Array2::zeros((4, 4));
        let w = Array2::from_elem((4, 4), 0.125);
        let base = difference_norms(&a, &z, &w).unwrap();
        let scaled = difference_norms(&(&a * c), &z, &w).unwrap();
        for (s, b) in scaled.as_array().iter().zip(base.as_array()) {
            prop_assert!((s - c.abs() * b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        prop_assert!(base.l2 * base.l2 <= base.linf * base.l1 * (1.0 + 1e-12));
    }

    #[test]
    fn csv_round_trips(vals in prop::collection::vec(prop::array::uniform6(1e-12f64..1e3), 1..5)) {
        let rows: Vec<_> = vals.iter().enumerate().map(|(k, v)| (8usize << k, *v)).collect();
        let r = report_from(&rows);
        let back = ConvergenceReport::from_csv(&r.to_csv()).unwrap();
        prop_assert_eq!(back, r);
    }
}
