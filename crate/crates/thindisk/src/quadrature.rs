//! Adaptive Gauss–Kronrod quadrature in one and two dimensions.

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel; returns (estimate, |K15 - G7|).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let x = h * XGK[k];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive bisection until each panel meets its share of the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (whole, _) = gk15(&mut f, a, b);
    let tol = abs_tol.max(rel_tol * whole.abs());
    refine(&mut f, a, b, tol, 0)
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (est, err) = gk15(f, a, b);
    if err <= tol || depth >= 48 || (b - a).abs() < 1e-14 * (a.abs() + b.abs()) {
        return est;
    }
    let m = 0.5 * (a + b);
    refine(f, a, m, 0.5 * tol, depth + 1) + refine(f, m, b, 0.5 * tol, depth + 1)
}

/// Iterated integral of `f(x, y)` over `[x0, x1] × [y0, y1]`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    let inner_abs = abs_tol / (x1 - x0).abs().max(1e-300);
    integrate(
        |x| integrate(|y| f(x, y), y0, y1, 0.01 * inner_abs, 0.01 * rel_tol),
        x0,
        x1,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-14, 1e-14);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-13, 1e-13);
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn double_integral() {
        let v = integrate_2d(|x, y| (x * y).exp(), (0.0, 1.0), (0.0, 1.0), 1e-13, 1e-13);
        assert!((v - 1.3179021514544038).abs() < 1e-11);
    }
}
