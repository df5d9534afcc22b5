use ndarray::{Array1, Array2};
use proptest::prelude::*;

use thindisk::cartesian_kernels::{CartesianKernel, KernelTables};
use thindisk::convolve::{
    direct_convolve, direct_convolve_table, fft_convolve, layout_kernel, unwrap_offset, wrap_offset, Convolver, Layout,
};
use thindisk::grid::{CartesianGrid, PolarGrid};
use thindisk::polar_kernels::{PolarKernel, PolarKernelTables};

fn field(n: usize, seed: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| seed[(7 * i + 3 * j) % seed.len()] + 0.01 * i as f64)
}

fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn max_rel(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    max_abs(&(a - b)) / max_abs(b)
}

/// FFT error against the direct sum, relative to the sum of absolute terms.
/// Outputs that cancel to zero by symmetry are otherwise pure roundoff.
fn conditioned_err(kernel: &Array2<f64>, f: &Array2<f64>, layout: Layout) -> f64 {
    let fast = fft_convolve(kernel, f.view(), layout).unwrap();
    let slow = direct_convolve_table(kernel, f.view(), layout);
    let bound = direct_convolve_table(&kernel.mapv(f64::abs), f.mapv(f64::abs).view(), layout);
    max_abs(&(fast - slow)) / max_abs(&bound).max(f64::MIN_POSITIVE)
}

#[test]
fn offsets_wrap_and_unwrap() {
    for len in [4usize, 16, 64] {
        for k in 0..len {
            assert_eq!(wrap_offset(unwrap_offset(k, len), len), k);
        }
        assert_eq!(unwrap_offset(len / 2, len), (len / 2) as i64);
        assert_eq!(unwrap_offset(len / 2 + 1, len), -(len as i64) / 2 + 1);
    }
}

#[test]
fn delta_field_reproduces_kernel() {
    let n = 8;
    let kernel = layout_kernel(n, Layout::Aperiodic, |di, dj| (di * 100 + dj) as f64);
    let mut f = Array2::zeros((n, n));
    f[[0, 0]] = 1.0;
    let out = fft_convolve(&kernel, f.view(), Layout::Aperiodic).unwrap();
    for ((i, j), v) in out.indexed_iter() {
        assert!((v - (i as f64 * 100.0 + j as f64)).abs() < 1e-10);
    }
}

#[test]
fn radial_layout_is_periodic_in_angle() {
    let n = 8;
    let kernel = layout_kernel(n, Layout::RadialPadded, |di, dj| if di == 0 && dj == 1 { 1.0 } else { 0.0 });
    let f = Array2::from_shape_fn((n, n), |(i, j)| (i * n + j) as f64);
    let out = fft_convolve(&kernel, f.view(), Layout::RadialPadded).unwrap();
    for ((i, j), v) in out.indexed_iter() {
        assert!((v - f[[i, (j + n - 1) % n]]).abs() < 1e-10);
    }
}

#[test]
fn direct_sum_of_closure_matches_table() {
    let n = 6;
    let f = field(n, &[0.3, -1.0, 0.7]);
    let k = |di: i64, dj: i64| 1.0 / (1.0 + (di * di + 2 * dj * dj) as f64);
    let t = layout_kernel(n, Layout::Aperiodic, k);
    assert!(max_rel(&direct_convolve(k, f.view(), Layout::Aperiodic), &direct_convolve_table(&t, f.view(), Layout::Aperiodic)) < 1e-15);
}

#[test]
fn shape_errors_are_reported() {
    let c = Convolver::new(8, Layout::Aperiodic).unwrap();
    assert!(c.field_spectrum(Array2::zeros((4, 4)).view()).is_err());
    assert!(Convolver::new(0, Layout::Aperiodic).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cartesian_tables_fft_equals_direct(n in prop::sample::select(vec![8usize, 16, 32]), seed in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let t = KernelTables::tabulate(&CartesianGrid::new(1.0, n).unwrap());
        let f = field(n, &seed);
        for k in CartesianKernel::ALL {
            prop_assert!(conditioned_err(t.table(k), &f, Layout::Aperiodic) <= 1e-10, "{:?}", k);
        }
    }

    #[test]
    fn polar_tables_fft_equals_direct(n in prop::sample::select(vec![8usize, 16, 32]), seed in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let t = PolarKernelTables::tabulate(&PolarGrid::new(1.0, n, 0.99).unwrap());
        let f = field(n, &seed);
        let ring = Array1::from_shape_fn(n, |j| seed[j % seed.len()]).to_vec();
        let conv = Convolver::new(n, Layout::RadialPadded).unwrap();
        for k in PolarKernel::ALL {
            prop_assert!(conditioned_err(t.table(k), &f, Layout::RadialPadded) <= 1e-10, "{:?}", k);
            let spec = conv.ring_kernel_spectra(t.hole_table(k)).unwrap();
            let fast = conv.ring_convolve_sum(&[(&spec, &ring)]).unwrap();
            let slow = Array2::from_shape_fn((n, n), |(i, j)| {
                (0..n).map(|jp| t.get_hole(k, i, j as i64 - jp as i64) * ring[jp]).sum::<f64>()
            });
            // each row is its own transform
            for i in 0..n {
                let bound = (0..n).map(|j| (0..n).map(|jp| (t.get_hole(k, i, j as i64 - jp as i64) * ring[jp]).abs()).sum::<f64>()).fold(0.0f64, f64::max);
                let err = (0..n).map(|j| (fast[[i, j]] - slow[[i, j]]).abs()).fold(0.0f64, f64::max);
                prop_assert!(err <= 1e-10 * bound.max(f64::MIN_POSITIVE), "{:?} ring row {}", k, i);
            }
        }
    }
}
