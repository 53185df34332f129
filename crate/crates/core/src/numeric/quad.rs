//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 20_000;
const REL_FLOOR: f64 = 1e-14;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature: value, estimated absolute error, and function evaluations.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], abs_tol)
}

/// Integrate over the union of consecutive segments given by `points`
/// (sorted ascending). Interior points mark known kinks or jumps.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], abs_tol: f64) -> Result<Integral> {
    if points.len() < 2 {
        return Ok(Integral { value: 0.0, error: 0.0, evals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(Error::Numeric(format!("invalid quadrature segment [{a}, {b}]")));
        }
        if b > a {
            heap.push(kronrod(&mut f, a, b));
            evals += 15;
        }
    }
    // Segments too narrow to split further are frozen here.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut running_error: f64 = heap.iter().map(|s| s.error).sum();
    let mut running_value: f64 = heap.iter().map(|s| s.value).sum();
    loop {
        let approx_target = abs_tol.max(REL_FLOOR * (running_value + frozen_value).abs());
        if running_error + frozen_error <= approx_target || heap.is_empty() || heap.len() > MAX_INTERVALS {
            let (value, error) = heap
                .iter()
                .fold((frozen_value, frozen_error), |(v, e), s| (v + s.value, e + s.error));
            if !value.is_finite() {
                return Err(Error::Numeric("non-finite integrand value encountered".into()));
            }
            let target = abs_tol.max(REL_FLOOR * value.abs());
            if error <= target || heap.is_empty() {
                return Ok(Integral { value, error, evals });
            }
            if heap.len() > MAX_INTERVALS {
                return Err(Error::Numeric(format!(
                    "quadrature did not converge: estimate {value:e}, error {error:e} > tolerance {target:e} after {evals} evaluations"
                )));
            }
            running_error = error - frozen_error;
            running_value = value - frozen_value;
        }
        let worst = heap.pop().expect("nonempty heap");
        running_error -= worst.error;
        running_value -= worst.value;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(worst.b.abs()) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        running_error += left.error + right.error;
        running_value += left.value + right.value;
        heap.push(left);
        heap.push(right);
        evals += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        assert!((r.value - (63.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let r = integrate(crate::numeric::normal_pdf, -40.0, 40.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jump_discontinuity() {
        let r = integrate(|x| if x > 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 0.7).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-8).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{}", r.value);
    }
}
