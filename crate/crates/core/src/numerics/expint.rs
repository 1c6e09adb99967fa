use num_complex::Complex64;

/// ∫₀^len e^{t·s} ds for complex `t`.
///
/// `len` may be `+∞` when `Re t < 0`. Small |t·len| uses the series to
/// keep removable singularities (t → 0) exact.
pub fn exp_integral(t: Complex64, len: f64) -> Complex64 {
    if len.is_infinite() {
        debug_assert!(t.re < 0.0);
        return -1.0 / t;
    }
    let z = t * len;
    if z.norm() < 1e-3 {
        // len * (1 + z/2 + z²/6 + z³/24 + z⁴/120 + z⁵/720)
        let poly = 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0))));
        return poly * len;
    }
    (z.exp() - 1.0) / t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_formula_and_limit() {
        let t = Complex64::new(0.3, 2.0);
        let direct = ((t * 1.7).exp() - 1.0) / t;
        assert!((exp_integral(t, 1.7) - direct).norm() < 1e-14);
        assert!((exp_integral(Complex64::new(0.0, 0.0), 2.5) - 2.5).norm() < 1e-15);
        let tiny = Complex64::new(0.0, 1e-7);
        let expected = Complex64::new((1e-7f64 * 2.0).sin() / 1e-7, 2.0 * (1e-7f64).sin().powi(2) / 1e-7);
        assert!((exp_integral(tiny, 2.0) - expected).norm() < 1e-14);
        let decay = Complex64::new(-2.0, 1.0);
        assert!((exp_integral(decay, f64::INFINITY) - 1.0 / Complex64::new(2.0, -1.0)).norm() < 1e-15);
    }
}
