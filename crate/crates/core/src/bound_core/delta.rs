use super::linear_part::{LinearPart, MomentEstimate};
use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;

/// Relative tolerance of the δ bisections.
pub const DELTA_REL_TOL: f64 = 1e-6;
const INITIAL_BRACKET: f64 = 2.0;
const MAX_DOUBLINGS: usize = 60;

/// `β = Σ E g_i² I(|g_i| > 1) + Σ E|g_i|³ I(|g_i| ≤ 1)`.
pub fn compute_beta(part: &LinearPart) -> Result<MomentEstimate> {
    part.expect_sum(
        &|g: f64| {
            let a = g.abs();
            if a > 1.0 {
                a * a
            } else {
                a * a * a
            }
        },
        &[1.0],
    )
}

/// `L(δ) = Σ E|g_i| min(δ, |g_i|)`; nondecreasing with limit `Σ E g_i²`.
pub fn concentration_mass(part: &LinearPart, delta: f64) -> Result<MomentEstimate> {
    part.expect_sum(&|g: f64| g.abs() * g.abs().min(delta), &[delta])
}

/// `Σ E g_i² I(|g_i| > δ)`.
pub fn truncated_second_moment(part: &LinearPart, delta: f64) -> Result<MomentEstimate> {
    part.expect_sum(&|g: f64| if g.abs() > delta { g * g } else { 0.0 }, &[delta])
}

fn expand_bracket<F>(mut pred: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    let mut hi = INITIAL_BRACKET;
    for _ in 0..MAX_DOUBLINGS {
        if pred(hi)? {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::Numeric(format!("no admissible δ below {hi}")))
}

/// Smallest δ with `L(δ) ≥ 1/2`, to relative tolerance `tolerance`.
pub fn solve_delta_minimal(part: &LinearPart, tolerance: f64) -> Result<f64> {
    part.check_normalization(tolerance.max(1e-6))?;
    let pred = |d: f64| concentration_mass(part, d).map(|l| l.value >= 0.5);
    let hi = expand_bracket(pred)?;
    bisect_increasing(0.0, hi, tolerance, f64::MIN_POSITIVE, pred)
}

/// δ from a `p`-th absolute moment sum. `beyond_three` marks `p > 3`, where
/// the formula still yields an admissible δ but the moment bounds do not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PMomentDelta {
    pub delta: f64,
    pub beyond_three: bool,
}

pub fn delta_from_p_moment(p: f64, sum_p_moment: f64) -> Result<PMomentDelta> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::Domain(format!("moment order must exceed 2, got {p}")));
    }
    if !(sum_p_moment > 0.0 && sum_p_moment.is_finite()) {
        return Err(Error::Domain(format!("moment sum must be positive and finite, got {sum_p_moment}")));
    }
    let q = p - 2.0;
    let factor = 2.0 * q.powf(q) / (p - 1.0).powf(p - 1.0);
    Ok(PMomentDelta { delta: (factor * sum_p_moment).powf(1.0 / q), beyond_three: p > 3.0 })
}

/// Smallest δ with `Σ E g_i² I(|g_i| > δ) ≤ 1/2`. For i.i.d. summands this is
/// `c₀/√n` with `c₀` the matching constant for `√n g₁`.
pub fn delta_from_truncation(part: &LinearPart) -> Result<f64> {
    let pred = |d: f64| truncated_second_moment(part, d).map(|t| t.value <= 0.5);
    let hi = expand_bracket(pred)?;
    bisect_increasing(0.0, hi, DELTA_REL_TOL, f64::MIN_POSITIVE, pred)
}

/// Lower bound `a − (p−2)^{p−2} a^{p−1} / ((p−1)^{p−1} b^{p−2})` for `min(a, b)`.
pub fn min_lower_bound(a: f64, b: f64, p: f64) -> f64 {
    let q = p - 2.0;
    a - q.powf(q) * a.powf(p - 1.0) / ((p - 1.0).powf(p - 1.0) * b.powf(q))
}

/// Whether `min(a, b)` dominates [`min_lower_bound`] (up to rounding).
pub fn min_lower_bound_holds(a: f64, b: f64, p: f64) -> bool {
    a.min(b) >= min_lower_bound(a, b, p) - 1e-12 * a.max(b)
}

#[cfg(test)]
mod tests {
    use super::super::linear_part::{LinearPart, SummandLaw};
    use super::*;

    fn rademacher(n: usize) -> LinearPart {
        let a = 1.0 / (n as f64).sqrt();
        LinearPart::iid(n, SummandLaw::Atoms(vec![(-a, 0.5), (a, 0.5)])).unwrap()
    }

    fn normal(n: usize) -> LinearPart {
        LinearPart::iid(n, SummandLaw::Normal { sd: 1.0 / (n as f64).sqrt() }).unwrap()
    }

    #[test]
    fn beta_rademacher() {
        assert!((compute_beta(&rademacher(100)).unwrap().value - 0.1).abs() < 1e-15);
        let unit = LinearPart::iid(1, SummandLaw::Atoms(vec![(-1.0, 0.5), (1.0, 0.5)])).unwrap();
        assert_eq!(compute_beta(&unit).unwrap().value, 1.0);
    }

    #[test]
    fn beta_normal_matches_third_moment() {
        // Tail above one standard unit is ten standard deviations away.
        let expected = 100.0 * 0.1f64.powi(3) * 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        let b = compute_beta(&normal(100)).unwrap().value;
        assert!((b - expected).abs() < 1e-9, "{b}");
        assert!((b - 0.1596).abs() < 1e-4);
    }

    #[test]
    fn minimal_delta_rademacher() {
        let d4 = solve_delta_minimal(&rademacher(4), DELTA_REL_TOL).unwrap();
        assert!((d4 - 0.25).abs() <= 0.25 * 2e-6, "{d4}");
        let d100 = solve_delta_minimal(&rademacher(100), DELTA_REL_TOL).unwrap();
        assert!((d100 - 0.05).abs() <= 0.05 * 2e-6, "{d100}");
    }

    #[test]
    fn p_moment_delta() {
        let d = delta_from_p_moment(3.0, 0.1).unwrap();
        assert!((d.delta - 0.05).abs() < 1e-15 && !d.beyond_three);
        let d4 = delta_from_p_moment(4.0, 0.27).unwrap();
        assert!((d4.delta - (8.0f64 / 27.0 * 0.27).sqrt()).abs() < 1e-15 && d4.beyond_three);
        assert!((d4.delta - 0.2828).abs() < 1e-4);
        assert!(delta_from_p_moment(2.0, 0.1).is_err());
        assert!(delta_from_p_moment(1.5, 0.1).is_err());
        assert!(delta_from_p_moment(3.0, 0.0).is_err());
    }

    #[test]
    fn truncation_delta() {
        let d = delta_from_truncation(&rademacher(100)).unwrap();
        assert!(d >= 0.1 && d <= 0.1 * (1.0 + 2e-6), "{d}");
        let unit = LinearPart::iid(1, SummandLaw::Atoms(vec![(-1.0, 0.5), (1.0, 0.5)])).unwrap();
        let d1 = delta_from_truncation(&unit).unwrap();
        assert!(d1 >= 1.0 && d1 <= 1.0 + 2e-6);
    }

    #[test]
    fn unnormalized_model_is_rejected() {
        let bad = LinearPart::iid(4, SummandLaw::Normal { sd: 1.0 }).unwrap();
        assert!(matches!(solve_delta_minimal(&bad, DELTA_REL_TOL), Err(Error::InvalidModel(_))));
    }
}
