//! Per-index laws of the linear summands `g_i(X_i)` and expectation oracles over them.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// A scalar estimate with its standard error. `replicates == 0` marks an
/// analytic or quadrature value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
    pub replicates: u64,
}

impl MomentEstimate {
    pub const fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, replicates: 0 }
    }

    pub fn is_analytic(&self) -> bool {
        self.replicates == 0
    }

    pub fn scale(self, k: f64) -> Self {
        Self { value: self.value * k, std_error: self.std_error * k.abs(), replicates: self.replicates }
    }

    /// Sum with linearly added errors; a conservative bound for dependent terms.
    pub fn plus(self, other: MomentEstimate) -> Self {
        Self {
            value: self.value + other.value,
            std_error: self.std_error + other.std_error,
            replicates: self.replicates.max(other.replicates),
        }
    }
}

pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Law of one summand `g_i(X_i)`.
#[derive(Clone)]
pub enum SummandLaw {
    /// `map(X)` with `X` from a catalog law; expectations by quadrature.
    Transformed { dist: Distribution, map: RealMap },
    /// Centered normal with standard deviation `sd`.
    Normal { sd: f64 },
    /// Finite support: `(value, probability)` pairs.
    Atoms(Vec<(f64, f64)>),
    /// Empirical draws; expectations carry a Monte Carlo standard error.
    Sampled(Arc<Vec<f64>>),
}

impl fmt::Debug for SummandLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Transformed { dist, .. } => write!(f, "Transformed({dist})"),
            Self::Normal { sd } => write!(f, "Normal(sd={sd})"),
            Self::Atoms(a) => write!(f, "Atoms({a:?})"),
            Self::Sampled(s) => write!(f, "Sampled(len={})", s.len()),
        }
    }
}

impl SummandLaw {
    /// `E f(g)`, where `f` may be non-smooth at `|g| = kink` for each kink.
    pub fn expect(&self, f: &dyn Fn(f64) -> f64, kinks: &[f64]) -> Result<MomentEstimate> {
        match self {
            Self::Transformed { dist, map } => {
                dist.expect_composed(|x| map(x), f, kinks).map(MomentEstimate::exact)
            }
            Self::Normal { sd } => {
                if *sd <= 0.0 {
                    return Ok(MomentEstimate::exact(f(0.0)));
                }
                let breaks: Vec<f64> = kinks.iter().flat_map(|k| [-k / sd, k / sd]).collect();
                Distribution::StdNormal.expect(|z| f(sd * z), &breaks).map(MomentEstimate::exact)
            }
            Self::Atoms(atoms) => {
                let v: NeumaierSum = atoms.iter().map(|&(x, p)| p * f(x)).collect();
                Ok(MomentEstimate::exact(v.value()))
            }
            Self::Sampled(xs) => {
                if xs.is_empty() {
                    return Err(Error::UnsupportedModel("empty sample for Monte Carlo moment oracle".into()));
                }
                let n = xs.len() as f64;
                let mean = xs.iter().map(|&x| f(x)).collect::<NeumaierSum>().value() / n;
                let ss = xs.iter().map(|&x| (f(x) - mean).powi(2)).collect::<NeumaierSum>().value();
                let se = if xs.len() > 1 { (ss / (n - 1.0) / n).sqrt() } else { 0.0 };
                Ok(MomentEstimate { value: mean, std_error: se, replicates: xs.len() as u64 })
            }
        }
    }
}

/// A group of `count` identically distributed summands.
#[derive(Debug, Clone)]
pub struct SummandBlock {
    pub count: usize,
    pub law: SummandLaw,
}

/// The linear part `W = Σ g_i(X_i)` described through per-index laws.
#[derive(Debug, Clone)]
pub struct LinearPart {
    blocks: Vec<SummandBlock>,
}

impl LinearPart {
    pub fn new(blocks: Vec<SummandBlock>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().all(|b| b.count == 0) {
            return Err(Error::UnsupportedModel("linear part has no summands".into()));
        }
        Ok(Self { blocks })
    }

    pub fn iid(count: usize, law: SummandLaw) -> Result<Self> {
        Self::new(vec![SummandBlock { count, law }])
    }

    pub fn blocks(&self) -> &[SummandBlock] {
        &self.blocks
    }

    /// Number of summands `n`.
    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }

    /// `Σ_i E f(g_i(X_i))`.
    pub fn expect_sum(&self, f: &dyn Fn(f64) -> f64, kinks: &[f64]) -> Result<MomentEstimate> {
        let mut total = MomentEstimate::exact(0.0);
        for b in &self.blocks {
            let e = b.law.expect(f, kinks)?.scale(b.count as f64);
            total = total.plus(e);
        }
        Ok(total)
    }

    /// `Σ E g_i²`; equals one under the standard normalization.
    pub fn second_moment_sum(&self) -> Result<MomentEstimate> {
        self.expect_sum(&|g| g * g, &[])
    }

    /// `Σ E|g_i|^p`.
    pub fn abs_moment_sum(&self, p: f64) -> Result<MomentEstimate> {
        self.expect_sum(&|g: f64| g.abs().powf(p), &[])
    }

    /// `Σ P(|g_i| > t)`.
    pub fn tail_sum(&self, t: f64) -> Result<MomentEstimate> {
        self.expect_sum(&|g: f64| if g.abs() > t { 1.0 } else { 0.0 }, &[t])
    }

    /// Verify `E g_i = 0` and `Σ E g_i² = 1` within `tol` (plus 4 standard errors
    /// for sampled laws).
    pub fn check_normalization(&self, tol: f64) -> Result<()> {
        let total = self.second_moment_sum()?;
        if (total.value - 1.0).abs() > tol.max(4.0 * total.std_error) {
            return Err(Error::InvalidModel(format!(
                "linear part is not normalized: sum of second moments = {} (se {})",
                total.value, total.std_error
            )));
        }
        for b in &self.blocks {
            let m = b.law.expect(&|g| g, &[])?;
            if m.value.abs() > tol.max(4.0 * m.std_error) {
                return Err(Error::InvalidModel(format!("summand law {:?} is not centered: mean {}", b.law, m.value)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_atoms() {
        let n = 100;
        let a = 1.0 / (n as f64).sqrt();
        let part = LinearPart::iid(n, SummandLaw::Atoms(vec![(-a, 0.5), (a, 0.5)])).unwrap();
        assert!((part.second_moment_sum().unwrap().value - 1.0).abs() < 1e-14);
        part.check_normalization(1e-9).unwrap();
        assert_eq!(part.tail_sum(0.2).unwrap().value, 0.0);
    }

    #[test]
    fn sampled_law_reports_error() {
        let xs: Vec<f64> = (0..1000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let law = SummandLaw::Sampled(Arc::new(xs));
        let e = law.expect(&|g| g, &[]).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.std_error > 0.0 && e.replicates == 1000);
    }

    #[test]
    fn unnormalized_part_rejected() {
        let part = LinearPart::iid(10, SummandLaw::Normal { sd: 1.0 }).unwrap();
        assert!(matches!(part.check_normalization(1e-6), Err(Error::InvalidModel(_))));
    }
}
