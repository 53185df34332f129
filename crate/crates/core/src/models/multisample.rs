//! Multisample U-statistics over `k` independent groups.

use super::combin::{binomial, check_cap, for_each_combination};
use super::ustat::KernelFn;
use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::{LinearPart, RealMap, SummandBlock, SummandLaw};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use rand::RngCore;
use std::fmt;
use std::sync::Arc;

/// Multisample kernels. Arguments are passed group by group.
#[derive(Clone)]
pub enum MultiKernel {
    /// Two groups, one argument each: `I(x ≤ y) − 1/2`.
    Wilcoxon,
    /// User kernel with per-group arities, centered projections `h_j`,
    /// `θ = E h` and `σ = ‖h − θ‖₂`.
    Custom {
        name: String,
        arities: Vec<usize>,
        h: KernelFn,
        theta: f64,
        sigma: f64,
        projections: Vec<RealMap>,
    },
}

impl fmt::Debug for MultiKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl MultiKernel {
    pub const CATALOG: [&'static str; 1] = ["wilcoxon"];

    pub fn from_name(name: &str) -> Option<Self> {
        (name == "wilcoxon").then_some(Self::Wilcoxon)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Wilcoxon => "wilcoxon".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn arities(&self) -> Vec<usize> {
        match self {
            Self::Wilcoxon => vec![1, 1],
            Self::Custom { arities, .. } => arities.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, args: &[f64]) -> f64 {
        match self {
            Self::Wilcoxon => {
                if args[0] <= args[1] {
                    0.5
                } else {
                    -0.5
                }
            }
            Self::Custom { h, .. } => h(args),
        }
    }

    pub fn theta(&self) -> f64 {
        match self {
            Self::Wilcoxon => 0.0,
            Self::Custom { theta, .. } => *theta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiUStatSpec {
    pub kernel: MultiKernel,
    /// `m_j`
    pub arities: Vec<usize>,
    /// `n_j`
    pub sizes: Vec<usize>,
    pub dists: Vec<Distribution>,
}

impl MultiUStatSpec {
    pub fn new(kernel: MultiKernel, dists: Vec<Distribution>, sizes: Vec<usize>) -> Result<Self> {
        let arities = kernel.arities();
        if arities.len() != sizes.len() || arities.len() != dists.len() {
            return Err(Error::InvalidModel(format!(
                "kernel {} expects {} groups, got {} sizes and {} laws",
                kernel.name(),
                arities.len(),
                sizes.len(),
                dists.len()
            )));
        }
        for (j, (&m, &n)) in arities.iter().zip(&sizes).enumerate() {
            if m == 0 || n < 2 * m {
                return Err(Error::InvalidModel(format!("group {j}: need n_j ≥ 2 m_j, got n_j = {n}, m_j = {m}")));
            }
        }
        if let (MultiKernel::Wilcoxon, Some(first)) = (&kernel, dists.first()) {
            if !first.is_continuous() || dists.iter().any(|d| d != first) {
                return Err(Error::InvalidModel(
                    "the wilcoxon kernel is centered only for a common continuous law".into(),
                ));
            }
        }
        Ok(Self { kernel, arities, sizes, dists })
    }

    pub fn wilcoxon(dist: Distribution, n1: usize, n2: usize) -> Result<Self> {
        Self::new(MultiKernel::Wilcoxon, vec![dist; 2], vec![n1, n2])
    }

    /// Centered projection `h_j` of group `j`.
    pub fn projection(&self, j: usize) -> RealMap {
        match &self.kernel {
            MultiKernel::Wilcoxon => {
                let dist = self.dists[0];
                if j == 0 {
                    Arc::new(move |x| 0.5 - dist.cdf(x))
                } else {
                    Arc::new(move |y| dist.cdf(y) - 0.5)
                }
            }
            MultiKernel::Custom { projections, .. } => projections[j].clone(),
        }
    }

    /// `E|h_j(X_{j1})|^p` by group.
    pub fn projection_abs_moments(&self, p: f64) -> Result<Vec<f64>> {
        match self.kernel {
            // h_j(X) is uniform on [−1/2, 1/2].
            MultiKernel::Wilcoxon => Ok(vec![0.5f64.powf(p) / (p + 1.0); 2]),
            MultiKernel::Custom { .. } => (0..self.sizes.len())
                .map(|j| {
                    let h = self.projection(j);
                    self.dists[j].expect_composed(|x| h(x), |v: f64| v.abs().powf(p), &[0.0])
                })
                .collect(),
        }
    }
}

/// `U − θ` by enumeration over all block selections.
pub fn multisample_value(spec: &MultiUStatSpec, data: &Observations) -> Result<f64> {
    if data.groups.len() != spec.arities.len() {
        return Err(Error::Domain(format!("expected {} groups, got {}", spec.arities.len(), data.groups.len())));
    }
    let mut total: u128 = 1;
    for (g, &m) in data.groups.iter().zip(&spec.arities) {
        if g.len() < m {
            return Err(Error::Domain(format!("group of size {} is smaller than its arity {m}", g.len())));
        }
        total = total.saturating_mul(binomial(g.len() as u64, m as u64));
    }
    check_cap(total, "multisample U-statistic")?;
    let selections: Vec<Vec<Vec<f64>>> = data
        .groups
        .iter()
        .zip(&spec.arities)
        .map(|(g, &m)| {
            let idx: Vec<usize> = (0..g.len()).collect();
            let mut out = Vec::new();
            for_each_combination(&idx, m, |c| out.push(c.iter().map(|&k| g[k]).collect()));
            out
        })
        .collect();
    let width: usize = spec.arities.iter().sum();
    let mut args = Vec::with_capacity(width);
    let mut acc = NeumaierSum::new();
    cartesian(&selections, 0, &mut args, &mut |a| acc.add(spec.kernel.eval(a)));
    Ok(acc.value() / total as f64 - spec.kernel.theta())
}

fn cartesian(sel: &[Vec<Vec<f64>>], j: usize, args: &mut Vec<f64>, f: &mut dyn FnMut(&[f64])) {
    if j == sel.len() {
        f(args);
        return;
    }
    for block in &sel[j] {
        let len = args.len();
        args.extend_from_slice(block);
        cartesian(sel, j + 1, args, f);
        args.truncate(len);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultisampleSigma {
    /// `σ_n̄ = (Σ m_j² σ_j² / n_j)^{1/2}`
    pub sigma_nbar: f64,
    /// `σ_j = ‖h_j‖₂`
    pub sigma_js: Vec<f64>,
    /// `σ = ‖h − θ‖₂`
    pub sigma: f64,
}

pub fn multisample_sigma(spec: &MultiUStatSpec) -> Result<MultisampleSigma> {
    let (sigma_js, sigma) = match &spec.kernel {
        MultiKernel::Wilcoxon => (vec![(1.0f64 / 12.0).sqrt(); 2], 0.5),
        MultiKernel::Custom { sigma, .. } => {
            let js = (0..spec.sizes.len())
                .map(|j| {
                    let h = spec.projection(j);
                    spec.dists[j].expect(|x| h(x).powi(2), &[]).map(f64::sqrt)
                })
                .collect::<Result<Vec<_>>>()?;
            (js, *sigma)
        }
    };
    if sigma_js.iter().all(|&s| s <= 1e-14 * sigma.max(1e-300)) {
        return Err(Error::Degenerate(format!("all projections of kernel {} vanish", spec.kernel.name())));
    }
    let var: f64 = spec
        .arities
        .iter()
        .zip(&spec.sizes)
        .zip(&sigma_js)
        .map(|((&m, &n), &s)| (m * m) as f64 * s * s / n as f64)
        .sum();
    Ok(MultisampleSigma { sigma_nbar: var.sqrt(), sigma_js, sigma })
}

/// `T = (U − θ)/σ_n̄` with linear part `Σ_j (m_j/n_j) Σ_l h_j(X_{jl}) / σ_n̄`.
#[derive(Clone)]
pub struct MultiUStatModel {
    pub spec: MultiUStatSpec,
    pub sigma: MultisampleSigma,
    projections: Vec<RealMap>,
}

impl fmt::Debug for MultiUStatModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiUStatModel").field("spec", &self.spec).field("sigma", &self.sigma).finish_non_exhaustive()
    }
}

impl MultiUStatModel {
    pub fn new(spec: MultiUStatSpec) -> Result<Self> {
        let sigma = multisample_sigma(&spec)?;
        let projections = (0..spec.sizes.len()).map(|j| spec.projection(j)).collect();
        Ok(Self { spec, sigma, projections })
    }

    fn coef(&self, j: usize) -> f64 {
        self.spec.arities[j] as f64 / (self.spec.sizes[j] as f64 * self.sigma.sigma_nbar)
    }

    fn check_shape(&self, data: &Observations) -> Result<()> {
        let ok = data.groups.len() == self.spec.sizes.len()
            && data.groups.iter().zip(&self.spec.sizes).all(|(g, &n)| g.len() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("observation groups do not match the model sizes".into()))
        }
    }

    fn wilcoxon_t(&self, count: u64) -> f64 {
        let pairs = (self.spec.sizes[0] * self.spec.sizes[1]) as f64;
        (count as f64 / pairs - 0.5) / self.sigma.sigma_nbar
    }
}

/// `#{y ∈ ys : y ≥ x}` for sorted `ys`.
fn count_ge(ys: &[f64], x: f64) -> u64 {
    (ys.len() - ys.partition_point(|&y| y < x)) as u64
}

/// `#{x ∈ xs : x ≤ y}` for sorted `xs`.
fn count_le(xs: &[f64], y: f64) -> u64 {
    xs.partition_point(|&x| x <= y) as u64
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

impl StatisticModel for MultiUStatModel {
    fn id(&self) -> String {
        let sizes: Vec<String> = self.spec.sizes.iter().map(usize::to_string).collect();
        format!("multisample:{}:{}:n={}", self.spec.kernel.name(), self.spec.dists[0], sizes.join("x"))
    }

    fn size(&self) -> u64 {
        self.spec.sizes.iter().sum::<usize>() as u64
    }

    fn arity(&self) -> Option<u64> {
        Some(self.spec.arities.iter().sum::<usize>() as u64)
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        Observations {
            groups: self
                .spec
                .sizes
                .iter()
                .zip(&self.spec.dists)
                .map(|(&n, d)| (0..n).map(|_| d.sample(rng)).collect())
                .collect(),
        }
    }

    fn statistic(&self, data: &Observations) -> Result<f64> {
        self.check_shape(data)?;
        match self.spec.kernel {
            MultiKernel::Wilcoxon => {
                let ys = sorted(&data.groups[1]);
                Ok(self.wilcoxon_t(data.groups[0].iter().map(|&x| count_ge(&ys, x)).sum()))
            }
            MultiKernel::Custom { .. } => Ok(multisample_value(&self.spec, data)? / self.sigma.sigma_nbar),
        }
    }

    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>> {
        self.check_shape(data)?;
        let mut out = Vec::with_capacity(data.len());
        for (j, g) in data.groups.iter().enumerate() {
            let c = self.coef(j);
            out.extend(g.iter().map(|&x| c * (self.projections[j])(x)));
        }
        Ok(out)
    }

    fn draw_copy(&self, i: usize, rng: &mut dyn RngCore) -> f64 {
        let mut j = 0;
        let mut rest = i;
        while j + 1 < self.spec.sizes.len() && rest >= self.spec.sizes[j] {
            rest -= self.spec.sizes[j];
            j += 1;
        }
        self.spec.dists[j].sample(rng)
    }

    fn linear_part(&self) -> Result<LinearPart> {
        let blocks = (0..self.spec.sizes.len())
            .map(|j| {
                let (h, c) = (self.projections[j].clone(), self.coef(j));
                SummandBlock {
                    count: self.spec.sizes[j],
                    law: SummandLaw::Transformed { dist: self.spec.dists[j], map: Arc::new(move |x| c * h(x)) },
                }
            })
            .collect();
        LinearPart::new(blocks)
    }

    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        if let MultiKernel::Custom { .. } = self.spec.kernel {
            let g = self.linear_terms(data)?;
            let t = self.statistic(data)?;
            let w = g.iter().copied().collect::<NeumaierSum>().value();
            let delta_i = match mode {
                None => Vec::new(),
                Some(m) => (0..g.len()).map(|i| self.delta_variant(data, i, m, rng)).collect::<Result<_>>()?,
            };
            return Ok(DecompositionSample { t, w, delta: t - w, g, delta_i, index_weight: 1.0 });
        }
        self.check_shape(data)?;
        let (xs, ys) = (&data.groups[0], &data.groups[1]);
        let (sx, sy) = (sorted(xs), sorted(ys));
        let count: u64 = xs.iter().map(|&x| count_ge(&sy, x)).sum();
        let t = self.wilcoxon_t(count);
        let g = self.linear_terms(data)?;
        let w = g.iter().copied().collect::<NeumaierSum>().value();
        let delta = t - w;
        let mut delta_i = Vec::new();
        if let Some(mode) = mode {
            delta_i.reserve(g.len());
            for (i, &gi) in g.iter().enumerate() {
                let (j, k) = data.locate(i).expect("index within observations");
                let new = match mode {
                    VariantMode::ZeroOut => 0.0,
                    VariantMode::Resample => self.spec.dists[j].sample(rng),
                };
                let new_count = if j == 0 {
                    count - count_ge(&sy, xs[k]) + count_ge(&sy, new)
                } else {
                    count - count_le(&sx, ys[k]) + count_le(&sx, new)
                };
                let g_new = self.coef(j) * (self.projections[j])(new);
                delta_i.push(self.wilcoxon_t(new_count) - (w - gi + g_new));
            }
        }
        Ok(DecompositionSample { t, w, delta, g, delta_i, index_weight: 1.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(a: &[f64], b: &[f64]) -> Observations {
        Observations { groups: vec![a.to_vec(), b.to_vec()] }
    }

    #[test]
    fn enumeration_values() {
        let spec = MultiUStatSpec::wilcoxon(Distribution::Uniform01, 2, 2).unwrap();
        assert_eq!(multisample_value(&spec, &obs(&[0.2], &[0.7])).unwrap(), 0.5);
        assert_eq!(multisample_value(&spec, &obs(&[0.2, 0.9], &[0.5])).unwrap(), 0.0);
    }

    #[test]
    fn constant_shift_moves_value() {
        let shifted = |c: f64| MultiKernel::Custom {
            name: "shifted".into(),
            arities: vec![1, 1],
            h: Arc::new(move |a: &[f64]| if a[0] <= a[1] { 0.5 + c } else { -0.5 + c }),
            theta: 0.0,
            sigma: 0.5,
            projections: vec![Arc::new(|x| 0.5 - x), Arc::new(|y| y - 0.5)],
        };
        let d = vec![Distribution::Uniform01; 2];
        let data = obs(&[0.1, 0.6, 0.35], &[0.2, 0.9, 0.4]);
        let base = multisample_value(&MultiUStatSpec::new(shifted(0.0), d.clone(), vec![3, 3]).unwrap(), &data).unwrap();
        let moved = multisample_value(&MultiUStatSpec::new(shifted(0.25), d, vec![3, 3]).unwrap(), &data).unwrap();
        assert!((moved - base - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sigma_values() {
        let s = multisample_sigma(&MultiUStatSpec::wilcoxon(Distribution::Uniform01, 1000, 1000).unwrap()).unwrap();
        assert!((s.sigma_nbar - (1.0f64 / 6000.0).sqrt()).abs() < 1e-15);
        assert!((s.sigma_nbar - 0.012910).abs() < 1e-6);
        assert_eq!(s.sigma, 0.5);
        let s = multisample_sigma(&MultiUStatSpec::wilcoxon(Distribution::Uniform01, 100, 100).unwrap()).unwrap();
        assert!((s.sigma_nbar.powi(2) - 1.0 / 600.0).abs() < 1e-16);
    }

    #[test]
    fn projection_moments_match_quadrature() {
        let spec = MultiUStatSpec::wilcoxon(Distribution::StdNormal, 10, 10).unwrap();
        let closed = spec.projection_abs_moments(3.0).unwrap();
        assert_eq!(closed[0], 1.0 / 32.0);
        for j in 0..2 {
            let h = spec.projection(j);
            let q = Distribution::StdNormal.expect_composed(|x| h(x), |v: f64| v.abs().powi(3), &[0.0]).unwrap();
            assert!((q - closed[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_mismatched_laws() {
        let r = MultiUStatSpec::new(MultiKernel::Wilcoxon, vec![Distribution::Uniform01, Distribution::StdNormal], vec![5, 5]);
        assert!(matches!(r, Err(Error::InvalidModel(_))));
        assert!(MultiUStatSpec::wilcoxon(Distribution::Uniform01, 1, 5).is_err());
    }

    #[test]
    fn fast_counts_match_enumeration() {
        let model = MultiUStatModel::new(MultiUStatSpec::wilcoxon(Distribution::Uniform01, 7, 6).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let data = model.sample_data(&mut rng);
            let t = model.statistic(&data).unwrap();
            let brute = multisample_value(&model.spec, &data).unwrap() / model.sigma.sigma_nbar;
            assert!((t - brute).abs() < 1e-12);
            let s = model.decompose(&data, Some(VariantMode::ZeroOut), &mut rng).unwrap();
            for i in 0..13 {
                let b = model.delta_with_replacement(&data, i, 0.0).unwrap();
                assert!((s.delta_i[i] - b).abs() < 1e-12, "{i}");
            }
        }
    }

    #[test]
    fn linearization_variance_matches_sigma_nbar() {
        let model = MultiUStatModel::new(MultiUStatSpec::wilcoxon(Distribution::Exponential1, 20, 30).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = 20_000;
        let ws: Vec<f64> = (0..r)
            .map(|_| model.linear_terms(&model.sample_data(&mut rng)).unwrap().iter().sum::<f64>())
            .collect();
        let m2 = ws.iter().map(|w| w * w).sum::<f64>() / r as f64;
        let se = ((ws.iter().map(|w| w.powi(4)).sum::<f64>() / r as f64 - m2 * m2) / r as f64).sqrt();
        assert!((m2 - 1.0).abs() < 4.0 * se, "{m2} ± {se}");
        model.linear_part().unwrap().check_normalization(1e-9).unwrap();
    }
}
