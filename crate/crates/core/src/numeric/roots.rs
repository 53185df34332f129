use crate::error::{Error, Result};

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, for a predicate that is
/// monotone (false then true). Stops when the bracket is within `rel_tol`
/// relative width (absolute below `abs_floor`). Returns the upper end, which
/// always satisfies the predicate.
pub fn bisect_increasing<F>(mut lo: f64, mut hi: f64, rel_tol: f64, abs_floor: f64, mut pred: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !pred(hi)? {
        return Err(Error::Numeric(format!("bisection bracket upper end {hi} does not satisfy predicate")));
    }
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs().max(abs_floor) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = bisect_increasing(0.0, 2.0, 1e-12, 1e-300, |x| Ok(x * x >= 2.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        assert!(r * r >= 2.0);
    }
}
