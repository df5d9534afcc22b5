//! Axisymmetric potential by the logarithmic-spiral transform.
//!
//! With `u = ln r`, the reduced density `e^{3u/2} Σ(e^u)` is Fourier
//! transformed in `u`, multiplied by the Kalnajs kernel `K(α, 0)` and
//! transformed back. Both transforms are trapezoid sums on truncated ranges.

use num_complex::Complex64;
use rayon::prelude::*;

use super::gamma::ln_gamma;
use crate::density::G;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalnajsConfig {
    /// Lower cutoff of `u = ln r`; stands in for `-∞`.
    pub u_min: f64,
    /// Spectral cutoff.
    pub alpha_max: f64,
    /// Trapezoid nodes on `[-α_max, α_max]`.
    pub n_alpha: usize,
    /// Trapezoid nodes on `[u_min, 0]`.
    pub n_u: usize,
    /// Azimuthal mode.
    pub m: u32,
}

impl Default for KalnajsConfig {
    fn default() -> Self {
        Self { u_min: -6.0, alpha_max: 60.0, n_alpha: 2048, n_u: 1024, m: 0 }
    }
}

impl KalnajsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_min < 0.0) || !self.u_min.is_finite() {
            return invalid(format!("u_min must be negative, got {}", self.u_min));
        }
        if !(self.alpha_max > 0.0) || !self.alpha_max.is_finite() {
            return invalid(format!("alpha_max must be positive, got {}", self.alpha_max));
        }
        if self.n_alpha < 2 || self.n_u < 2 {
            return invalid("node counts must be at least 2");
        }
        if self.m != 0 {
            return invalid("only the axisymmetric mode m = 0 is supported");
        }
        Ok(())
    }
}

/// `K(α, m) = ½ Γ((m+½+iα)/2) Γ((m+½-iα)/2) / (Γ((m+3/2+iα)/2) Γ((m+3/2-iα)/2))`.
pub fn kalnajs_gamma_kernel(alpha: f64, m: u32) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::Range(format!("alpha must be finite, got {alpha}")));
    }
    let m = m as f64;
    let a = Complex64::new(0.5 * (m + 0.5), 0.5 * alpha);
    let b = Complex64::new(0.5 * (m + 1.5), 0.5 * alpha);
    let log = ln_gamma(a) + ln_gamma(a.conj()) - ln_gamma(b) - ln_gamma(b.conj());
    let v = 0.5 * log.exp();
    if !v.re.is_finite() || v.re <= 0.0 || v.im.abs() > 1e-12 * v.re.abs() {
        return Err(Error::Range(format!("kernel not representable at alpha = {alpha}")));
    }
    Ok(v.re)
}

fn trapezoid_nodes(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / (n - 1) as f64;
    let x = (0..n).map(|k| a + k as f64 * h).collect();
    let w = (0..n).map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h }).collect();
    (x, w)
}

/// Potential at `radii` of an axisymmetric density `sigma(r)` supported in `r ≤ 1`.
pub fn kalnajs_potential_axisym<F: Fn(f64) -> f64 + Sync>(sigma: F, radii: &[f64], cfg: &KalnajsConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0) || !r.is_finite()) {
        return invalid(format!("query radii must be positive, got {r}"));
    }
    let (u, wu) = trapezoid_nodes(cfg.u_min, 0.0, cfg.n_u);
    let reduced: Vec<f64> = u.iter().zip(&wu).map(|(&u, &w)| w * (1.5 * u).exp() * sigma(u.exp())).collect();
    let (alpha, wa) = trapezoid_nodes(-cfg.alpha_max, cfg.alpha_max, cfg.n_alpha);
    let weighted: Vec<Complex64> = alpha
        .par_iter()
        .zip(wa.par_iter())
        .map(|(&a, &w)| {
            let transform: Complex64 = u
                .iter()
                .zip(&reduced)
                .map(|(&u, &f)| f * Complex64::from_polar(1.0, -a * u))
                .sum();
            Ok(w * kalnajs_gamma_kernel(a, cfg.m)? * transform)
        })
        .collect::<Result<_>>()?;
    Ok(radii
        .par_iter()
        .map(|&r| {
            let q = r.ln();
            let s: f64 = alpha
                .iter()
                .zip(&weighted)
                .map(|(&a, &c)| (c * Complex64::from_polar(1.0, a * q)).re)
                .sum();
            -G * s / r.sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_origin() {
        let k = kalnajs_gamma_kernel(0.0, 0).unwrap();
        assert!((k - 4.376_879_230_452_959).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_even_and_positive() {
        for a in [0.3, 2.0, 17.5, 59.0] {
            for m in 0..4 {
                let p = kalnajs_gamma_kernel(a, m).unwrap();
                assert!(p > 0.0);
                assert_eq!(p, kalnajs_gamma_kernel(-a, m).unwrap());
            }
        }
        assert!(kalnajs_gamma_kernel(f64::INFINITY, 0).is_err());
    }

    #[test]
    fn zero_density_gives_zero_potential() {
        let cfg = KalnajsConfig { n_alpha: 64, n_u: 64, ..Default::default() };
        let phi = kalnajs_potential_axisym(|_| 0.0, &[0.1, 0.5], &cfg).unwrap();
        assert!(phi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = KalnajsConfig { u_min: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = KalnajsConfig { n_u: 1, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
