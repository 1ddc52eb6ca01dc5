//! Cubic Hermite shape functions and element quadrature.

/// Five-point Gauss-Legendre rule on `[0, 1]`; exact for polynomials of degree <= 9.
pub(crate) const GAUSS5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_23),
    (0.5, 0.284_444_444_444_444_44),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_23),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

/// Derivatives of the four Hermite shape functions on an element of length `h`
/// at local coordinate `t`. Row `d` holds the `d`-th physical derivative of
/// `[N_value_left, N_slope_left, N_value_right, N_slope_right]`.
pub(crate) fn shape(t: f64, h: f64) -> [[f64; 4]; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = [
        1.0 - 3.0 * t2 + 2.0 * t3,
        h * (t - 2.0 * t2 + t3),
        3.0 * t2 - 2.0 * t3,
        h * (t3 - t2),
    ];
    let d1 = [
        (-6.0 * t + 6.0 * t2) / h,
        1.0 - 4.0 * t + 3.0 * t2,
        (6.0 * t - 6.0 * t2) / h,
        3.0 * t2 - 2.0 * t,
    ];
    let hh = h * h;
    let d2 = [
        (-6.0 + 12.0 * t) / hh,
        (-4.0 + 6.0 * t) / h,
        (6.0 - 12.0 * t) / hh,
        (6.0 * t - 2.0) / h,
    ];
    let hhh = hh * h;
    let d3 = [12.0 / hhh, 6.0 / hh, -12.0 / hhh, 6.0 / hh];
    [v, d1, d2, d3]
}

/// Value and first three derivatives of the cubic with end data `dofs`.
pub(crate) fn eval(dofs: &[f64; 4], t: f64, h: f64) -> [f64; 4] {
    let n = shape(t, h);
    let mut out = [0.0; 4];
    for (d, row) in n.iter().enumerate() {
        out[d] = row.iter().zip(dofs).map(|(a, b)| a * b).sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_sum_to_one_and_integrate_degree_nine() {
        let total: f64 = GAUSS5.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let integral: f64 = GAUSS5.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((integral - 0.1).abs() < 1e-15);
    }

    #[test]
    fn reproduces_cubic() {
        // p(x) = 1 + 2x - x^2 + 0.5x^3 on [0.3, 0.3 + h]
        let p = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let dp = |x: f64| 2.0 - 2.0 * x + 1.5 * x * x;
        let ddp = |x: f64| -2.0 + 3.0 * x;
        let (a, h) = (0.3, 0.7);
        let dofs = [p(a), dp(a), p(a + h), dp(a + h)];
        for t in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let x = a + t * h;
            let e = eval(&dofs, t, h);
            assert!((e[0] - p(x)).abs() < 1e-13);
            assert!((e[1] - dp(x)).abs() < 1e-13);
            assert!((e[2] - ddp(x)).abs() < 1e-12);
            assert!((e[3] - 3.0).abs() < 1e-11);
        }
    }
}
