//! Complex log-gamma by the Lanczos approximation (g = 7, nine terms).

use num_complex::Complex64;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Principal-branch-free `ln Γ(z)`, continuous along horizontal lines.
///
/// Arguments with real part below 1/2 are shifted up with `Γ(z) = Γ(z+1)/z`;
/// the poles at non-positive integers yield non-finite values.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 0.5 {
        shift -= z.ln();
        z += 1.0;
    }
    let z = z - 1.0;
    let mut a = Complex64::new(COEFFS[0], 0.0);
    for (k, &c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + a.ln() + shift
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn real_values() {
        let v = ln_gamma(Complex64::new(5.0, 0.0));
        assert!((v.re - 24f64.ln()).abs() < 1e-13);
        let h = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((h.re - 0.5 * PI.ln()).abs() < 1e-14);
        let q = ln_gamma(Complex64::new(0.25, 0.0));
        assert!((q.re - 3.625_609_908_221_908_3f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn modulus_identities_on_vertical_lines() {
        for y in [0.1, 1.0, 3.7, 12.0, 29.5] {
            let half = ln_gamma(Complex64::new(0.5, y)).re * 2.0;
            assert!((half - (PI / (PI * y).cosh()).ln()).abs() < 1e-11, "y = {y}");
            let one = ln_gamma(Complex64::new(1.0, y)).re * 2.0;
            assert!((one - (PI * y / (PI * y).sinh()).ln()).abs() < 1e-11, "y = {y}");
        }
    }

    #[test]
    fn reflection_formula() {
        for (x, y) in [(0.3, 0.7), (0.25, 5.0), (0.1, -2.0)] {
            let z = Complex64::new(x, y);
            let lhs = (ln_gamma(z) + ln_gamma(1.0 - z)).exp();
            let rhs = PI / (PI * z).sin();
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm(), "z = {z}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(0.75, 3.3);
        let a = ln_gamma(z);
        let b = ln_gamma(z.conj());
        assert!((a - b.conj()).norm() < 1e-13);
    }
}
