//! L-statistics `T(F_n) = (1/n) Σ X_(i) J(i/n)` with Lipschitz weights.

use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::{LinearPart, RealMap, SummandLaw};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::numeric::{integrate, NeumaierSum, DEFAULT_ABS_TOL};
use rand::RngCore;
use std::fmt;
use std::sync::Arc;

/// Weight functions `J` on `[0, 1]`.
#[derive(Clone)]
pub enum Weight {
    /// `J ≡ 1`; the statistic is the sample mean.
    Const1,
    /// `J(t) = t`
    Identity,
    /// User weight with a claimed Lipschitz constant, checked on a grid.
    Custom { name: String, j: RealMap, lipschitz: f64 },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

const LIPSCHITZ_GRID: usize = 2000;

impl Weight {
    pub const CATALOG: [&'static str; 2] = ["const1", "identity"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "const1" => Some(Self::Const1),
            "identity" => Some(Self::Identity),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Const1 => "const1".into(),
            Self::Identity => "identity".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Const1 => 1.0,
            Self::Identity => t,
            Self::Custom { j, .. } => j(t),
        }
    }

    /// Declared Lipschitz constant `c₀`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Const1 => 0.0,
            Self::Identity => 1.0,
            Self::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    /// Largest difference quotient of `J` on a uniform grid.
    pub fn grid_slope(&self) -> f64 {
        let h = 1.0 / LIPSCHITZ_GRID as f64;
        (0..LIPSCHITZ_GRID)
            .map(|k| {
                let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
                (self.eval(b) - self.eval(a)).abs() / h
            })
            .fold(0.0, f64::max)
    }

    /// Verify the declared constant against the grid.
    pub fn check_lipschitz(&self) -> Result<f64> {
        let c = self.lipschitz();
        let observed = self.grid_slope();
        if !(c >= 0.0) || observed > c * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::InvalidModel(format!(
                "weight {} has grid slope {observed} above its Lipschitz constant {c}",
                self.name()
            )));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct LStatSpec {
    pub weight: Weight,
    pub dist: Distribution,
    pub n: usize,
}

impl LStatSpec {
    pub fn new(weight: Weight, dist: Distribution, n: usize) -> Result<Self> {
        if !dist.is_continuous() {
            return Err(Error::InvalidModel(format!("L-statistics need a continuous law, got {dist}")));
        }
        if n == 0 {
            return Err(Error::InvalidModel("n must be positive".into()));
        }
        weight.check_lipschitz()?;
        Ok(Self { weight, dist, n })
    }

    /// `‖X₁‖₂`
    pub fn x_l2(&self) -> f64 {
        self.dist.second_moment().sqrt()
    }

    /// `T(F) = E X J(F(X))`.
    pub fn functional(&self) -> Result<f64> {
        match (&self.weight, self.dist) {
            (Weight::Const1, d) => Ok(d.mean()),
            (Weight::Identity, Distribution::Uniform01) => Ok(1.0 / 3.0),
            (w, d) => d.expect(|x| x * w.eval(d.cdf(x)), &[]),
        }
    }
}

/// `T(F_n)` with `J` evaluated at the post-jump values `i/n`.
pub fn lstat_value(spec: &LStatSpec, data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Domain("L-statistic of an empty sample".into()));
    }
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let acc: NeumaierSum = s.iter().enumerate().map(|(k, &x)| x * spec.weight.eval((k + 1) as f64 / n)).collect();
    Ok(acc.value() / n)
}

/// Piecewise cubic Hermite interpolant on a uniform grid, extended linearly
/// with the end slopes.
struct HermiteTable {
    lo: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let hi = self.lo + self.h * last as f64;
        if x <= self.lo {
            return self.values[0] + (x - self.lo) * self.slopes[0];
        }
        if x >= hi {
            return self.values[last] + (x - hi) * self.slopes[last];
        }
        let pos = (x - self.lo) / self.h;
        let k = (pos.floor() as usize).min(last - 1);
        let t = pos - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.h, self.slopes[k + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }
}

const TABLE_NODES: usize = 4000;

/// Tabulate `g = B − A` with `A(x) = ∫_{−∞}^x F J(F)` and `B(x) = ∫_x^∞ (1 − F) J(F)`.
fn tabulate_projection(weight: &Weight, dist: Distribution) -> Result<RealMap> {
    let (lo, hi) = dist.bulk();
    let h = (hi - lo) / TABLE_NODES as f64;
    let xs: Vec<f64> = (0..=TABLE_NODES).map(|k| lo + h * k as f64).collect();
    let a_rate = |s: f64| {
        let f = dist.cdf(s);
        f * weight.eval(f)
    };
    let b_rate = |s: f64| {
        let f = dist.cdf(s);
        (1.0 - f) * weight.eval(f)
    };
    let seg_tol = DEFAULT_ABS_TOL / TABLE_NODES as f64;
    let mut a = vec![0.0; TABLE_NODES + 1];
    let mut acc = NeumaierSum::new();
    for k in 1..=TABLE_NODES {
        acc.add(integrate(a_rate, xs[k - 1], xs[k], seg_tol)?.value);
        a[k] = acc.value();
    }
    let mut b = vec![0.0; TABLE_NODES + 1];
    let mut acc = NeumaierSum::new();
    for k in (0..TABLE_NODES).rev() {
        acc.add(integrate(b_rate, xs[k], xs[k + 1], seg_tol)?.value);
        b[k] = acc.value();
    }
    let values: Vec<f64> = b.iter().zip(&a).map(|(b, a)| b - a).collect();
    let slopes: Vec<f64> = xs.iter().map(|&x| -b_rate(x) - a_rate(x)).collect();
    let table = HermiteTable { lo, h, values, slopes };
    Ok(Arc::new(move |x| table.eval(x)))
}

/// `B(s) = ∫_s^∞ (1 − F) J(F)` by direct quadrature.
fn upper_tail_weight(weight: &Weight, dist: Distribution, s: f64) -> Result<f64> {
    let (_, hi) = dist.support();
    if s >= hi {
        return Ok(0.0);
    }
    integrate(
        |t| {
            let f = dist.cdf(t);
            (1.0 - f) * weight.eval(f)
        },
        s,
        hi,
        DEFAULT_ABS_TOL,
    )
    .map(|r| r.value)
}

/// Projection `g` of an L-statistic with its variance computed two ways.
#[derive(Clone)]
pub struct LStatProjection {
    /// `g(x) = ∫ (I(x ≤ s) − F(s)) J(F(s)) ds`
    pub g: RealMap,
    /// `σ` from the double-integral form.
    pub sigma: f64,
    /// `E g(X₁)²`
    pub eg2: f64,
    pub analytic: bool,
}

impl fmt::Debug for LStatProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LStatProjection")
            .field("sigma", &self.sigma)
            .field("eg2", &self.eg2)
            .field("analytic", &self.analytic)
            .finish_non_exhaustive()
    }
}

impl LStatProjection {
    pub fn abs_moment(&self, dist: Distribution, p: f64) -> Result<f64> {
        let g = self.g.clone();
        dist.expect_composed(|x| g(x), |v: f64| v.abs().powf(p), &[0.0])
    }
}

/// `g` and `σ² = ∬ J(F(s))J(F(t)) F(s∧t)(1 − F(s∨t)) ds dt`, cross-checked
/// against `E g(X₁)²`.
pub fn lstat_projection_sigma(spec: &LStatSpec) -> Result<LStatProjection> {
    let dist = spec.dist;
    let (g, analytic): (RealMap, bool) = match (&spec.weight, dist) {
        (Weight::Const1, d) => {
            let mu = d.mean();
            (Arc::new(move |x| mu - x), true)
        }
        (Weight::Identity, Distribution::Uniform01) => (Arc::new(|x| 1.0 / 6.0 - 0.5 * x * x), true),
        (w, d) => (tabulate_projection(w, d)?, false),
    };
    let sigma_sq = match (&spec.weight, dist) {
        (Weight::Const1, d) => d.variance(),
        (Weight::Identity, Distribution::Uniform01) => 1.0 / 45.0,
        (w, d) => {
            // Symmetric double integral folded onto s < t.
            let (lo, hi) = d.bulk();
            let mut failure = None;
            let v = integrate(
                |s| {
                    let f = d.cdf(s);
                    match upper_tail_weight(w, d, s) {
                        Ok(b) => 2.0 * w.eval(f) * f * b,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                lo,
                hi,
                DEFAULT_ABS_TOL,
            )?
            .value;
            if let Some(e) = failure {
                return Err(e);
            }
            v
        }
    };
    let gg = g.clone();
    let eg2 = dist.expect(|x| gg(x).powi(2), &[])?;
    if (eg2 - sigma_sq).abs() > 1e-8 * sigma_sq.max(1.0) {
        return Err(Error::Numeric(format!(
            "L-statistic variance mismatch: double integral {sigma_sq:e}, E g² {eg2:e}"
        )));
    }
    if !(sigma_sq > 0.0) {
        return Err(Error::Degenerate(format!("weight {} has σ = 0 under {dist}", spec.weight.name())));
    }
    Ok(LStatProjection { g, sigma: sigma_sq.sqrt(), eg2, analytic })
}

/// `T = √n (T(F_n) − T(F)) / σ` with linear part `−Σ g(X_i) / (√n σ)`.
#[derive(Debug, Clone)]
pub struct LStatModel {
    pub spec: LStatSpec,
    pub projection: LStatProjection,
    pub functional: f64,
    /// `J(k/n)/n` for `k = 1..n`.
    coefs: Vec<f64>,
}

impl LStatModel {
    pub fn new(spec: LStatSpec) -> Result<Self> {
        let projection = lstat_projection_sigma(&spec)?;
        let functional = spec.functional()?;
        let n = spec.n as f64;
        let coefs = (1..=spec.n).map(|k| spec.weight.eval(k as f64 / n) / n).collect();
        Ok(Self { spec, projection, functional, coefs })
    }

    pub fn sigma(&self) -> f64 {
        self.projection.sigma
    }

    fn t_scale(&self) -> f64 {
        (self.spec.n as f64).sqrt() / self.sigma()
    }

    fn g_scale(&self) -> f64 {
        -1.0 / ((self.spec.n as f64).sqrt() * self.sigma())
    }

    fn is_mean(&self) -> bool {
        matches!(self.spec.weight, Weight::Const1)
    }
}

impl StatisticModel for LStatModel {
    fn id(&self) -> String {
        format!("lstat:{}:{}:n={}", self.spec.weight.name(), self.spec.dist, self.spec.n)
    }

    fn size(&self) -> u64 {
        self.spec.n as u64
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        Observations::single((0..self.spec.n).map(|_| self.spec.dist.sample(rng)).collect())
    }

    fn statistic(&self, data: &Observations) -> Result<f64> {
        if self.is_mean() {
            return Ok(self.linear_terms(data)?.into_iter().collect::<NeumaierSum>().value());
        }
        Ok(self.t_scale() * (lstat_value(&self.spec, &data.groups[0])? - self.functional))
    }

    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>> {
        let s = self.g_scale();
        Ok(data.groups[0].iter().map(|&x| s * (self.projection.g)(x)).collect())
    }

    fn draw_copy(&self, _i: usize, rng: &mut dyn RngCore) -> f64 {
        self.spec.dist.sample(rng)
    }

    fn linear_part(&self) -> Result<LinearPart> {
        let (g, s) = (self.projection.g.clone(), self.g_scale());
        LinearPart::iid(self.spec.n, SummandLaw::Transformed { dist: self.spec.dist, map: Arc::new(move |x| s * g(x)) })
    }

    fn delta(&self, data: &Observations) -> Result<f64> {
        if self.is_mean() {
            return Ok(0.0);
        }
        let w: f64 = self.linear_terms(data)?.into_iter().collect::<NeumaierSum>().value();
        Ok(self.statistic(data)? - w)
    }

    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        let xs = &data.groups[0];
        let n = xs.len();
        if n != self.spec.n {
            return Err(Error::Domain(format!("expected {} observations, got {n}", self.spec.n)));
        }
        let g = self.linear_terms(data)?;
        let w = g.iter().copied().collect::<NeumaierSum>().value();
        if self.is_mean() {
            let delta_i = if mode.is_some() { vec![0.0; n] } else { Vec::new() };
            return Ok(DecompositionSample { t: w, w, delta: 0.0, g, delta_i, index_weight: 1.0 });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
        let s: Vec<f64> = order.iter().map(|&k| xs[k]).collect();
        let mut rank = vec![0usize; n];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r;
        }
        let c = &self.coefs;
        let level: f64 = s.iter().zip(c).map(|(x, c)| x * c).collect::<NeumaierSum>().value();
        let t = self.t_scale() * (level - self.functional);
        let delta = t - w;
        let mut delta_i = Vec::new();
        if let Some(mode) = mode {
            // down[k] = Σ_{j<k, j≥1} s_j (c_{j−1} − c_j); up[k] = Σ_{j<k, j≤n−2} s_j (c_{j+1} − c_j).
            let mut down = vec![0.0; n + 1];
            let mut up = vec![0.0; n + 1];
            for k in 0..n {
                down[k + 1] = down[k] + if k >= 1 { s[k] * (c[k - 1] - c[k]) } else { 0.0 };
                up[k + 1] = up[k] + if k + 1 < n { s[k] * (c[k + 1] - c[k]) } else { 0.0 };
            }
            delta_i.reserve(n);
            for i in 0..n {
                let new = match mode {
                    VariantMode::ZeroOut => 0.0,
                    VariantMode::Resample => self.draw_copy(i, rng),
                };
                let r = rank[i];
                let p = s.partition_point(|&v| v <= new);
                let diff = if new >= s[r] {
                    -s[r] * c[r] + (down[p] - down[r + 1]) + new * c[p - 1]
                } else {
                    -s[r] * c[r] + (up[r] - up[p]) + new * c[p]
                };
                let t_new = self.t_scale() * (level + diff - self.functional);
                let g_new = self.g_scale() * (self.projection.g)(new);
                delta_i.push(t_new - (w - g[i] + g_new));
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

    fn spec(w: Weight, d: Distribution, n: usize) -> LStatSpec {
        LStatSpec::new(w, d, n).unwrap()
    }

    #[test]
    fn values_follow_post_jump_convention() {
        let mean = spec(Weight::Const1, Distribution::StdNormal, 3);
        assert_eq!(lstat_value(&mean, &[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(lstat_value(&mean, &[0.7]).unwrap(), 0.7);
        let id = spec(Weight::Identity, Distribution::Uniform01, 2);
        assert_eq!(lstat_value(&id, &[1.0, 3.0]).unwrap(), 1.75);
    }

    #[test]
    fn catalog_variances() {
        let p = lstat_projection_sigma(&spec(Weight::Const1, Distribution::StdNormal, 10)).unwrap();
        assert!((p.sigma - 1.0).abs() < 1e-12 && (p.eg2 - 1.0).abs() < 1e-9);
        let p = lstat_projection_sigma(&spec(Weight::Const1, Distribution::Uniform01, 10)).unwrap();
        assert!((p.sigma.powi(2) - 1.0 / 12.0).abs() < 1e-12);
        let p = lstat_projection_sigma(&spec(Weight::Identity, Distribution::Uniform01, 10)).unwrap();
        assert!((p.eg2 - 1.0 / 45.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_projection_matches_closed_forms() {
        let custom = |name: &str, j: fn(f64) -> f64, lipschitz| Weight::Custom { name: name.into(), j: Arc::new(j), lipschitz };
        // J(t) = t on Uniform(0, 1) through the generic route.
        let tab = lstat_projection_sigma(&spec(custom("t", |t| t, 1.0), Distribution::Uniform01, 10)).unwrap();
        assert!(!tab.analytic);
        for x in [0.0, 0.1, 0.37, 0.5, 0.93, 1.0] {
            assert!(((tab.g)(x) - (1.0 / 6.0 - 0.5 * x * x)).abs() < 1e-10, "{x}");
        }
        assert!((tab.sigma.powi(2) - 1.0 / 45.0).abs() < 1e-8);
        // J ≡ 1 on Exp(1): g(x) = 1 − x.
        let tab = lstat_projection_sigma(&spec(custom("one", |_| 1.0, 0.0), Distribution::Exponential1, 10)).unwrap();
        for x in [0.0, 0.5, 2.0, 7.0] {
            assert!(((tab.g)(x) - (1.0 - x)).abs() < 1e-9, "{x}");
        }
        // J(t) = t on Exp(1): g = B − A in closed form.
        let tab = lstat_projection_sigma(&spec(Weight::Identity, Distribution::Exponential1, 10)).unwrap();
        for x in [0.0, 0.3, 1.0, 4.0] {
            let (e1, e2) = ((-x as f64).exp(), (-2.0 * x as f64).exp());
            let a = x - 2.0 * (1.0 - e1) + 0.5 * (1.0 - e2);
            let b = e1 - 0.5 * e2;
            assert!(((tab.g)(x) - (b - a)).abs() < 1e-9, "{x}");
        }
        lstat_projection_sigma(&spec(Weight::Identity, Distribution::StdNormal, 10)).unwrap();
    }

    #[test]
    fn lipschitz_check_rejects_understated_constants() {
        let j = Weight::Custom { name: "sq".into(), j: Arc::new(|t| t * t), lipschitz: 1.0 };
        assert!(matches!(LStatSpec::new(j, Distribution::Uniform01, 10), Err(Error::InvalidModel(_))));
        assert_eq!(Weight::Identity.check_lipschitz().unwrap(), 1.0);
        assert!(LStatSpec::new(Weight::Const1, Distribution::Rademacher, 10).is_err());
    }

    #[test]
    fn fast_leave_one_out_matches_recomputation() {
        for dist in [Distribution::Uniform01, Distribution::StdNormal] {
            let model = LStatModel::new(spec(Weight::Identity, dist, 25)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let mut data = model.sample_data(&mut rng);
            data.groups[0][3] = data.groups[0][7];
            for mode in [VariantMode::ZeroOut, VariantMode::Resample] {
                let mut fast_rng = ChaCha8Rng::seed_from_u64(99);
                let s = model.decompose(&data, Some(mode), &mut fast_rng).unwrap();
                let mut brute_rng = ChaCha8Rng::seed_from_u64(99);
                for i in 0..25 {
                    let b = model.delta_variant(&data, i, mode, &mut brute_rng).unwrap();
                    assert!((s.delta_i[i] - b).abs() < 1e-12, "{dist} {i}: {} vs {b}", s.delta_i[i]);
                }
                assert!((s.t - model.statistic(&data).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_weight_is_remainder_free() {
        let model = LStatModel::new(spec(Weight::Const1, Distribution::Exponential1, 30)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = model.sample_decomposition(&mut rng, Some(VariantMode::ZeroOut)).unwrap();
        assert_eq!(s.delta, 0.0);
        assert_eq!(s.t, s.w);
    }
}
