use libm::{erf, erfc};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function. `normal_cdf(-inf) == 0`.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `Φ(b) − Φ(a)` without cancellation when both points sit near the origin.
pub fn normal_cdf_diff(a: f64, b: f64) -> f64 {
    if a.is_finite() && b.is_finite() && a.abs() < 1.0 && b.abs() < 1.0 {
        0.5 * (erf(b * FRAC_1_SQRT_2) - erf(a * FRAC_1_SQRT_2))
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-14, "{}", normal_cdf(1.96));
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_095).abs() < 1e-16);
        assert_eq!(normal_cdf(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn small_differences_keep_precision() {
        let d = normal_cdf_diff(1.72e-6, 1e-4);
        let expected = normal_pdf(0.0) * (1e-4 - 1.72e-6);
        assert!((d - expected).abs() / expected < 1e-8);
    }
}
