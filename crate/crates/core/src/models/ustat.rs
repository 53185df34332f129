//! One-sample U-statistics with symmetric kernels.

use super::combin::{binomial, check_cap, for_each_combination};
use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::{LinearPart, MomentEstimate, RealMap, SummandLaw};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use rand::RngCore;
use std::fmt;
use std::sync::Arc;

pub type KernelFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Symmetric kernels. Catalog kernels are bivariate.
#[derive(Clone)]
pub enum Kernel {
    /// `(x − y)²/2 − 1`
    Variance,
    /// `x + y`
    Sum,
    /// `x y`
    Product,
    /// A user kernel of arbitrary arity with its mean `θ` under the sampling
    /// law and, optionally, its centered projection.
    Custom {
        name: String,
        arity: usize,
        h: KernelFn,
        theta: f64,
        projection: Option<RealMap>,
    },
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Kernel {
    pub const CATALOG: [&'static str; 3] = ["variance", "sum", "product"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "variance" => Some(Self::Variance),
            "sum" => Some(Self::Sum),
            "product" => Some(Self::Product),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Variance => "variance".into(),
            Self::Sum => "sum".into(),
            Self::Product => "product".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::Custom { arity, .. } => *arity,
            _ => 2,
        }
    }

    #[inline]
    pub fn eval(&self, args: &[f64]) -> f64 {
        match self {
            Self::Variance => {
                let d = args[0] - args[1];
                0.5 * d * d - 1.0
            }
            Self::Sum => args[0] + args[1],
            Self::Product => args[0] * args[1],
            Self::Custom { h, .. } => h(args),
        }
    }

    /// `θ = E h` under `dist`.
    pub fn theta(&self, dist: Distribution) -> f64 {
        let (mu, v) = (dist.mean(), dist.variance());
        match self {
            Self::Variance => v - 1.0,
            Self::Sum => 2.0 * mu,
            Self::Product => mu * mu,
            Self::Custom { theta, .. } => *theta,
        }
    }

    /// Centered projection `g(x) = E h(x, X₂, …) − θ`, when known in closed form.
    pub fn projection(&self, dist: Distribution) -> Option<RealMap> {
        let (mu, v) = (dist.mean(), dist.variance());
        match self {
            Self::Variance => Some(Arc::new(move |x: f64| 0.5 * ((x - mu) * (x - mu) - v))),
            Self::Sum => Some(Arc::new(move |x: f64| x - mu)),
            Self::Product => Some(Arc::new(move |x: f64| mu * (x - mu))),
            Self::Custom { projection, .. } => projection.clone(),
        }
    }

    /// Degenerate remainder `h(x, y) − θ − g(x) − g(y)` of bivariate catalog kernels.
    fn remainder(&self, dist: Distribution) -> Option<fn(f64, f64, f64) -> f64> {
        let _ = dist;
        match self {
            Self::Variance => Some(|x, y, mu| -(x - mu) * (y - mu)),
            Self::Sum => Some(|_, _, _| 0.0),
            Self::Product => Some(|x, y, mu| (x - mu) * (y - mu)),
            Self::Custom { .. } => None,
        }
    }

    /// `(σ², σ₁²)` for catalog kernels.
    fn analytic_variances(&self, dist: Distribution) -> Option<(f64, f64)> {
        let (mu, v, mu4) = (dist.mean(), dist.variance(), dist.central_moment4());
        match self {
            Self::Variance => Some((0.5 * mu4 + 0.5 * v * v, 0.25 * (mu4 - v * v))),
            Self::Sum => Some((2.0 * v, v)),
            Self::Product => Some(((v + mu * mu).powi(2) - mu.powi(4), mu * mu * v)),
            Self::Custom { .. } => None,
        }
    }
}

/// A U-statistic of arity `m` on `n` i.i.d. draws from `dist`.
#[derive(Debug, Clone)]
pub struct UStatSpec {
    pub kernel: Kernel,
    pub m: usize,
    pub n: usize,
    pub dist: Distribution,
    pub theta: f64,
}

impl UStatSpec {
    pub fn new(kernel: Kernel, dist: Distribution, n: usize) -> Result<Self> {
        let m = kernel.arity();
        if m < 2 {
            return Err(Error::InvalidModel(format!("kernel arity must be at least 2, got {m}")));
        }
        if n <= m {
            return Err(Error::InvalidModel(format!("sample size n = {n} must exceed the kernel arity m = {m}")));
        }
        let theta = kernel.theta(dist);
        Ok(Self { kernel, m, n, dist, theta })
    }

    /// Centered kernel value `h − θ`.
    #[inline]
    pub fn centered(&self, args: &[f64]) -> f64 {
        self.kernel.eval(args) - self.theta
    }
}

/// `U_n − θ` by exact enumeration over all `m`-subsets of `data`.
pub fn ustat_value(spec: &UStatSpec, data: &[f64]) -> Result<f64> {
    let n = data.len();
    let m = spec.m;
    if n < m {
        return Err(Error::Domain(format!("need at least m = {m} observations, got {n}")));
    }
    let count = binomial(n as u64, m as u64);
    check_cap(count, "U-statistic")?;
    let mut acc = NeumaierSum::new();
    if m == 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                acc.add(spec.kernel.eval(&[data[i], data[j]]));
            }
        }
    } else {
        let items: Vec<usize> = (0..n).collect();
        let mut args = vec![0.0; m];
        for_each_combination(&items, m, |c| {
            for (a, &k) in args.iter_mut().zip(c) {
                *a = data[k];
            }
            acc.add(spec.kernel.eval(&args));
        });
    }
    Ok(acc.value() / count as f64 - spec.theta)
}

/// Monte Carlo estimate of `g(x) = E h(x, Y₂, …, Y_m) − θ`.
pub fn hajek_projection_mc(spec: &UStatSpec, x: f64, replicates: usize, rng: &mut dyn RngCore) -> MomentEstimate {
    let mut args = vec![0.0; spec.m];
    args[0] = x;
    let mut s = NeumaierSum::new();
    let mut s2 = NeumaierSum::new();
    for _ in 0..replicates {
        for a in args.iter_mut().skip(1) {
            *a = spec.dist.sample(rng);
        }
        let v = spec.centered(&args);
        s.add(v);
        s2.add(v * v);
    }
    let r = replicates as f64;
    let mean = s.value() / r;
    let var = (s2.value() / r - mean * mean).max(0.0) * r / (r - 1.0).max(1.0);
    MomentEstimate { value: mean, std_error: (var / r).sqrt(), replicates: replicates as u64 }
}

/// Projection `g(x)`: analytic when cataloged, otherwise Monte Carlo.
pub fn hajek_projection(spec: &UStatSpec, x: f64, replicates: usize, rng: &mut dyn RngCore) -> MomentEstimate {
    match spec.kernel.projection(spec.dist) {
        Some(g) => MomentEstimate::exact(g(x)),
        None => hajek_projection_mc(spec, x, replicates, rng),
    }
}

/// Kernel and projection moments of a U-statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UStatMoments {
    /// `σ = ‖h − θ‖₂`
    pub sigma: f64,
    /// `σ₁ = ‖g‖₂`
    pub sigma1: f64,
    pub p: f64,
    /// `E|g(X₁)|^p`
    pub g_abs_p: f64,
    /// `E|h − θ|^p`, when computed.
    pub h_abs_p: Option<f64>,
}

/// Analytic `σ`, `σ₁` and quadrature `E|g|^p`, `E|h|^p` for catalog kernels.
pub fn ustat_moments(spec: &UStatSpec, p: f64) -> Result<UStatMoments> {
    let (s2, s1sq) = spec
        .kernel
        .analytic_variances(spec.dist)
        .ok_or_else(|| Error::UnsupportedModel(format!("no analytic moments for kernel {}", spec.kernel.name())))?;
    if s1sq <= 1e-14 * s2.max(1e-300) {
        return Err(Error::Degenerate(format!(
            "kernel {} under {} has a vanishing projection (σ₁ = 0)",
            spec.kernel.name(),
            spec.dist
        )));
    }
    let g = spec.kernel.projection(spec.dist).expect("catalog kernel has a projection");
    let g_abs_p = spec.dist.expect_composed(|x| g(x), |y: f64| y.abs().powf(p), &[0.0])?;
    let h_abs_p = kernel_abs_moment(spec, p)?;
    Ok(UStatMoments { sigma: s2.sqrt(), sigma1: s1sq.sqrt(), p, g_abs_p, h_abs_p: Some(h_abs_p) })
}

/// `E|h(X₁, X₂) − θ|^p` by nested quadrature (bivariate kernels).
fn kernel_abs_moment(spec: &UStatSpec, p: f64) -> Result<f64> {
    if spec.m != 2 {
        return Err(Error::UnsupportedModel("kernel moment quadrature needs a bivariate kernel".into()));
    }
    let dist = spec.dist;
    let failure = std::cell::RefCell::new(None);
    let outer = dist.expect(
        |x| match dist.expect(|y| spec.centered(&[x, y]).abs().powf(p), &[]) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &[],
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// Monte Carlo `σ`, `σ₁` and `E|g|^p` for kernels without closed forms.
/// `σ₁²` uses `E[h(X, Y)h(X, Y')]` over pairs sharing one argument.
pub fn ustat_moments_mc(spec: &UStatSpec, p: f64, replicates: usize, rng: &mut dyn RngCore) -> Result<(UStatMoments, f64)> {
    let m = spec.m;
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut h2 = NeumaierSum::new();
    let mut cross = NeumaierSum::new();
    let mut cross2 = NeumaierSum::new();
    for _ in 0..replicates {
        let x = spec.dist.sample(rng);
        a[0] = x;
        b[0] = x;
        for k in 1..m {
            a[k] = spec.dist.sample(rng);
            b[k] = spec.dist.sample(rng);
        }
        let (ha, hb) = (spec.centered(&a), spec.centered(&b));
        h2.add(ha * ha);
        cross.add(ha * hb);
        cross2.add((ha * hb).powi(2));
    }
    let r = replicates as f64;
    let s1sq = cross.value() / r;
    let se = ((cross2.value() / r - s1sq * s1sq).max(0.0) / r).sqrt();
    if s1sq <= 5.0 * se {
        return Err(Error::Degenerate(format!(
            "projection variance {s1sq:e} is not significantly positive (se {se:e})"
        )));
    }
    let sigma = (h2.value() / r).sqrt();
    let mut gp = NeumaierSum::new();
    let inner = 256;
    let draws = (replicates / inner).max(64);
    for _ in 0..draws {
        let x = spec.dist.sample(rng);
        gp.add(hajek_projection_mc(spec, x, inner, rng).value.abs().powf(p));
    }
    let moments = UStatMoments { sigma, sigma1: s1sq.sqrt(), p, g_abs_p: gp.value() / draws as f64, h_abs_p: None };
    Ok((moments, se))
}

/// The normalized U-statistic `√n (U_n − θ) / (m σ₁)` with its Hoeffding projection.
#[derive(Clone)]
pub struct UStatModel {
    pub spec: UStatSpec,
    pub sigma: f64,
    pub sigma1: f64,
    projection: RealMap,
}

impl fmt::Debug for UStatModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UStatModel")
            .field("spec", &self.spec)
            .field("sigma", &self.sigma)
            .field("sigma1", &self.sigma1)
            .finish_non_exhaustive()
    }
}

impl UStatModel {
    pub fn new(spec: UStatSpec) -> Result<Self> {
        let projection = spec
            .kernel
            .projection(spec.dist)
            .ok_or_else(|| Error::UnsupportedModel(format!("kernel {} has no projection", spec.kernel.name())))?;
        let (s2, s1sq) = spec
            .kernel
            .analytic_variances(spec.dist)
            .ok_or_else(|| Error::UnsupportedModel(format!("no analytic moments for kernel {}", spec.kernel.name())))?;
        if s1sq <= 1e-14 * s2.max(1e-300) {
            return Err(Error::Degenerate(format!(
                "kernel {} under {} has a vanishing projection (σ₁ = 0)",
                spec.kernel.name(),
                spec.dist
            )));
        }
        Ok(Self { spec, sigma: s2.sqrt(), sigma1: s1sq.sqrt(), projection })
    }

    /// Model with externally supplied `σ` and `σ₁` (e.g. Monte Carlo moments).
    pub fn with_moments(spec: UStatSpec, sigma: f64, sigma1: f64) -> Result<Self> {
        let projection = spec
            .kernel
            .projection(spec.dist)
            .ok_or_else(|| Error::UnsupportedModel(format!("kernel {} has no projection", spec.kernel.name())))?;
        if !(sigma1 > 0.0) {
            return Err(Error::Degenerate("σ₁ must be positive".into()));
        }
        Ok(Self { spec, sigma, sigma1, projection })
    }

    fn n(&self) -> f64 {
        self.spec.n as f64
    }

    /// Scale `√n / (m σ₁)` applied to `U_n − θ`.
    fn t_scale(&self) -> f64 {
        self.n().sqrt() / (self.spec.m as f64 * self.sigma1)
    }

    fn g_scale(&self) -> f64 {
        1.0 / (self.n().sqrt() * self.sigma1)
    }

    /// Sum of `h − θ` over subsets containing a fixed argument `x` and the
    /// `m − 1` others drawn from `data` without index `skip`.
    fn contribution(&self, data: &[f64], skip: usize, x: f64) -> f64 {
        let m = self.spec.m;
        let mut acc = NeumaierSum::new();
        if m == 2 {
            for (j, &y) in data.iter().enumerate() {
                if j != skip {
                    acc.add(self.spec.centered(&[x, y]));
                }
            }
        } else {
            let others: Vec<usize> = (0..data.len()).filter(|&j| j != skip).collect();
            let mut args = vec![0.0; m];
            args[0] = x;
            for_each_combination(&others, m - 1, |c| {
                for (a, &k) in args[1..].iter_mut().zip(c) {
                    *a = data[k];
                }
                acc.add(self.spec.centered(&args));
            });
        }
        acc.value()
    }
}

impl StatisticModel for UStatModel {
    fn id(&self) -> String {
        format!("ustat:{}:{}:m={}:n={}", self.spec.kernel.name(), self.spec.dist, self.spec.m, self.spec.n)
    }

    fn size(&self) -> u64 {
        self.spec.n as u64
    }

    fn arity(&self) -> Option<u64> {
        Some(self.spec.m as u64)
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        Observations::single((0..self.spec.n).map(|_| self.spec.dist.sample(rng)).collect())
    }

    fn statistic(&self, data: &Observations) -> Result<f64> {
        Ok(self.t_scale() * ustat_value(&self.spec, &data.groups[0])?)
    }

    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>> {
        let s = self.g_scale();
        Ok(data.groups[0].iter().map(|&x| s * (self.projection)(x)).collect())
    }

    fn draw_copy(&self, _i: usize, rng: &mut dyn RngCore) -> f64 {
        self.spec.dist.sample(rng)
    }

    fn linear_part(&self) -> Result<LinearPart> {
        let g = self.projection.clone();
        let s = self.g_scale();
        LinearPart::iid(
            self.spec.n,
            SummandLaw::Transformed { dist: self.spec.dist, map: Arc::new(move |x| s * g(x)) },
        )
    }

    fn delta(&self, data: &Observations) -> Result<f64> {
        let xs = &data.groups[0];
        match (self.spec.m, self.spec.kernel.remainder(self.spec.dist)) {
            (2, Some(rem)) => {
                let n = xs.len();
                check_cap(binomial(n as u64, 2), "U-statistic")?;
                let mu = self.spec.dist.mean();
                let mut acc = NeumaierSum::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        acc.add(rem(xs[i], xs[j], mu));
                    }
                }
                Ok(self.t_scale() * acc.value() / binomial(n as u64, 2) as f64)
            }
            _ => {
                let w: f64 = self.linear_terms(data)?.iter().sum();
                Ok(self.statistic(data)? - w)
            }
        }
    }

    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        let xs = &data.groups[0];
        let n = xs.len();
        let g = self.linear_terms(data)?;
        let w = g.iter().copied().collect::<NeumaierSum>().value();
        let remainder = match self.spec.m {
            2 => self.spec.kernel.remainder(self.spec.dist),
            _ => None,
        };
        let (t, delta) = match remainder {
            Some(_) => {
                let delta = self.delta(data)?;
                (w + delta, delta)
            }
            None => {
                let t = self.statistic(data)?;
                (t, t - w)
            }
        };
        let mut delta_i = Vec::new();
        if let Some(mode) = mode {
            let subsets = binomial(n as u64, self.spec.m as u64) as f64;
            let mu = self.spec.dist.mean();
            let pair_scale = self.t_scale() / subsets;
            delta_i.reserve(n);
            for i in 0..n {
                let x_new = match mode {
                    VariantMode::ZeroOut => 0.0,
                    VariantMode::Resample => self.draw_copy(i, rng),
                };
                let d = match remainder {
                    Some(rem) => {
                        let mut acc = NeumaierSum::new();
                        for (j, &y) in xs.iter().enumerate() {
                            if j != i {
                                acc.add(rem(x_new, y, mu) - rem(xs[i], y, mu));
                            }
                        }
                        delta + pair_scale * acc.value()
                    }
                    None => {
                        let du = self.contribution(xs, i, x_new) - self.contribution(xs, i, xs[i]);
                        let dw = self.g_scale() * ((self.projection)(x_new) - (self.projection)(xs[i]));
                        delta + pair_scale * du - dw
                    }
                };
                delta_i.push(d);
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

    fn normal_spec(kernel: Kernel, n: usize) -> UStatSpec {
        UStatSpec::new(kernel, Distribution::StdNormal, n).unwrap()
    }

    #[test]
    fn enumeration_values() {
        let v = normal_spec(Kernel::Variance, 3);
        assert!(ustat_value(&v, &[1.0, -1.0, 0.0]).unwrap().abs() < 1e-15);
        let s = normal_spec(Kernel::Sum, 3);
        assert!((ustat_value(&s, &[1.0, 2.0, 3.0]).unwrap() - 4.0).abs() < 1e-15);
        let p = normal_spec(Kernel::Product, 3);
        assert!((ustat_value(&p, &[1.0, 2.0, 3.0]).unwrap() - 11.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_is_enforced() {
        let v = normal_spec(Kernel::Variance, 3);
        let data = vec![0.5; 1500];
        assert!(matches!(ustat_value(&v, &data), Err(Error::Capacity(_))));
    }

    #[test]
    fn projection_analytic_and_mc() {
        let v = normal_spec(Kernel::Variance, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (x, expected) in [(2.0, 1.5), (0.0, -0.5)] {
            assert_eq!(hajek_projection(&v, x, 0, &mut rng).value, expected);
            let mc = hajek_projection_mc(&v, x, 200_000, &mut rng);
            assert!((mc.value - expected).abs() < 4.0 * mc.std_error, "{mc:?}");
        }
        let s = normal_spec(Kernel::Sum, 10);
        assert_eq!(hajek_projection(&s, 1.0, 0, &mut rng).value, 1.0);
    }

    #[test]
    fn catalog_moments() {
        let m = ustat_moments(&normal_spec(Kernel::Variance, 50), 3.0).unwrap();
        assert!((m.sigma * m.sigma - 2.0).abs() < 1e-14);
        assert!((m.sigma1 * m.sigma1 - 0.5).abs() < 1e-14);
        // h = Z² − 1 in law, so E|h|³ = E|Z² − 1|³ = 8 E|g|³.
        assert!((m.h_abs_p.unwrap() - 8.0 * m.g_abs_p).abs() < 1e-8, "{m:?}");
        let s = ustat_moments(&normal_spec(Kernel::Sum, 50), 3.0).unwrap();
        assert!((s.sigma * s.sigma - 2.0).abs() < 1e-14 && (s.sigma1 - 1.0).abs() < 1e-14);
        assert!(matches!(ustat_moments(&normal_spec(Kernel::Product, 50), 3.0), Err(Error::Degenerate(_))));
        assert!(matches!(UStatModel::new(normal_spec(Kernel::Product, 50)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn monte_carlo_moments_match_catalog() {
        let spec = UStatSpec::new(Kernel::Variance, Distribution::Uniform01, 20).unwrap();
        let exact = ustat_moments(&spec, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mc, se) = ustat_moments_mc(&spec, 3.0, 400_000, &mut rng).unwrap();
        assert!((mc.sigma1.powi(2) - exact.sigma1.powi(2)).abs() < 4.0 * se);
        assert!(mc.sigma >= mc.sigma1);
        let degenerate = normal_spec(Kernel::Product, 20);
        assert!(matches!(ustat_moments_mc(&degenerate, 3.0, 100_000, &mut rng), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sum_kernel_remainder_is_exactly_zero() {
        let model = UStatModel::new(normal_spec(Kernel::Sum, 30)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mode in [VariantMode::ZeroOut, VariantMode::Resample] {
            let s = model.sample_decomposition(&mut rng, Some(mode)).unwrap();
            assert_eq!(s.delta, 0.0);
            assert!(s.delta_i.iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn decomposition_reproduces_statistic() {
        let model = UStatModel::new(normal_spec(Kernel::Variance, 50)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let data = model.sample_data(&mut rng);
            let s = model.decompose(&data, None, &mut rng).unwrap();
            let direct = model.statistic(&data).unwrap();
            assert!((s.w + s.delta - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn fast_leave_one_out_matches_recomputation() {
        let spec = UStatSpec::new(Kernel::Variance, Distribution::Exponential1, 12).unwrap();
        let model = UStatModel::new(spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = model.sample_data(&mut rng);
        let s = model.decompose(&data, Some(VariantMode::ZeroOut), &mut rng).unwrap();
        for i in 0..12 {
            let brute = model.statistic(&data.with_replacement(i, 0.0).unwrap()).unwrap()
                - model.linear_terms(&data.with_replacement(i, 0.0).unwrap()).unwrap().iter().sum::<f64>();
            assert!((s.delta_i[i] - brute).abs() < 1e-12, "{i}: {} vs {brute}", s.delta_i[i]);
        }
    }

    #[test]
    fn generic_arity_path() {
        // Kernel x y z − 1 on Exp(1): θ = 0, projection g(x) = x − 1.
        let kernel = Kernel::Custom {
            name: "triple".into(),
            arity: 3,
            h: Arc::new(|a: &[f64]| a[0] * a[1] * a[2]),
            theta: 1.0,
            projection: Some(Arc::new(|x| x - 1.0)),
        };
        let spec = UStatSpec::new(kernel, Distribution::Exponential1, 8).unwrap();
        let model = UStatModel::with_moments(spec, 7f64.sqrt(), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data = model.sample_data(&mut rng);
        let s = model.decompose(&data, Some(VariantMode::ZeroOut), &mut rng).unwrap();
        for i in 0..8 {
            let brute = model.delta_with_replacement(&data, i, 0.0).unwrap();
            assert!((s.delta_i[i] - brute).abs() < 1e-12);
        }
    }
}
