//! Normalized sums of i.i.d. observations, `T = W`.

use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::{LinearPart, SummandLaw};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use rand::RngCore;
use std::sync::Arc;

/// `T = W = Σ (X_i − μ) / (√n σ_X)`; the remainder vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSumModel {
    pub dist: Distribution,
    pub n: usize,
}

impl LinearSumModel {
    pub fn new(dist: Distribution, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("linear model needs n ≥ 1".into()));
        }
        Ok(Self { dist, n })
    }

    fn scale(&self) -> f64 {
        1.0 / ((self.n as f64).sqrt() * self.dist.variance().sqrt())
    }
}

impl StatisticModel for LinearSumModel {
    fn id(&self) -> String {
        format!("linear:{}:n={}", self.dist, self.n)
    }

    fn size(&self) -> u64 {
        self.n as u64
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        Observations::single((0..self.n).map(|_| self.dist.sample(rng)).collect())
    }

    fn statistic(&self, data: &Observations) -> Result<f64> {
        Ok(self.linear_terms(data)?.into_iter().collect::<NeumaierSum>().value())
    }

    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>> {
        let (mu, s) = (self.dist.mean(), self.scale());
        Ok(data.groups[0].iter().map(|&x| s * (x - mu)).collect())
    }

    fn draw_copy(&self, _i: usize, rng: &mut dyn RngCore) -> f64 {
        self.dist.sample(rng)
    }

    fn linear_part(&self) -> Result<LinearPart> {
        let (mu, s) = (self.dist.mean(), self.scale());
        let law = match self.dist {
            Distribution::Rademacher => SummandLaw::Atoms(vec![(-s, 0.5), (s, 0.5)]),
            dist => SummandLaw::Transformed { dist, map: Arc::new(move |x| s * (x - mu)) },
        };
        LinearPart::iid(self.n, law)
    }

    fn delta(&self, _data: &Observations) -> Result<f64> {
        Ok(0.0)
    }

    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, _rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        let g = self.linear_terms(data)?;
        let w = g.iter().copied().collect::<NeumaierSum>().value();
        let delta_i = if mode.is_some() { vec![0.0; g.len()] } else { Vec::new() };
        Ok(DecompositionSample { t: w, w, delta: 0.0, g, delta_i, index_weight: 1.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rademacher_sum_is_exactly_linear() {
        let model = LinearSumModel::new(Distribution::Rademacher, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = model.sample_decomposition(&mut rng, Some(VariantMode::Resample)).unwrap();
        assert_eq!(s.t, s.w);
        assert_eq!(s.delta, 0.0);
        assert!(s.delta_i.iter().all(|&d| d == 0.0));
        assert!(s.g.iter().all(|&g| g.abs() == 0.1));
        model.linear_part().unwrap().check_normalization(1e-12).unwrap();
    }

    #[test]
    fn continuous_laws_are_normalized() {
        for dist in [Distribution::StdNormal, Distribution::Uniform01, Distribution::Exponential1] {
            LinearSumModel::new(dist, 25).unwrap().linear_part().unwrap().check_normalization(1e-9).unwrap();
        }
    }
}
