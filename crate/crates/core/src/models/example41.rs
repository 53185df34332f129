//! The statistic `T = W − ε|W|^{−1/2} + ε c₀` with `W` exactly standard normal.

use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::{LinearPart, MomentEstimate, SummandLaw};
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_with_breaks, normal_cdf, normal_cdf_diff, normal_pdf, NeumaierSum};
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Upper end of the admissible `ε` range (exclusive).
pub const EPSILON_MAX: f64 = 1.0 / 64.0;

const TIGHT_TOL: f64 = 1e-13;

/// `c₀ = E|Z|^{−1/2} = 2^{−1/4} Γ(1/4) / √π`.
pub fn c0() -> f64 {
    2f64.powf(-0.25) * libm::tgamma(0.25) / PI.sqrt()
}

/// `c₀` by quadrature, after `|Z| = u²`: `4 ∫₀^∞ φ(u²) du`.
pub fn c0_quadrature() -> Result<f64> {
    Ok(4.0 * integrate(|u| normal_pdf(u * u), 0.0, 8.0, TIGHT_TOL)?.value)
}

/// `E|c₀ − |Z|^{−1/2}|`, so that `E|Δ| = ε κ_Δ`.
pub fn kappa_delta() -> Result<f64> {
    let c = c0();
    let f = |u: f64| 4.0 * (c * u - 1.0).abs() * normal_pdf(u * u);
    Ok(integrate_with_breaks(f, &[0.0, 1.0 / c, 8.0], TIGHT_TOL)?.value)
}

/// `E|Z| |c₀ − |Z|^{−1/2}|`, so that `E|WΔ| = ε κ_W`.
pub fn kappa_w() -> Result<f64> {
    let c = c0();
    let f = |u: f64| 4.0 * u * u * (c * u - 1.0).abs() * normal_pdf(u * u);
    Ok(integrate_with_breaks(f, &[0.0, 1.0 / c, 8.0], TIGHT_TOL)?.value)
}

/// `E|Z|³ = 2√(2/π)`
pub fn normal_abs_third_moment() -> f64 {
    2.0 * (2.0 / PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example41Spec {
    pub epsilon: f64,
    /// Number of summands of `W`; only `α` and `Σ E|X_i|³` depend on it.
    pub n: f64,
    pub c0: f64,
}

impl Example41Spec {
    pub fn new(epsilon: f64, n: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < EPSILON_MAX) {
            return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1/64)")));
        }
        if !(n >= 2.0) || !n.is_finite() {
            return Err(Error::Domain(format!("n = {n} must be finite and at least 2")));
        }
        Ok(Self { epsilon, n, c0: c0() })
    }

    /// `n = ε^{−4}`, the coupling under which `Σ E|X_i|³ + √α` is of order `ε`.
    pub fn coupled(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, epsilon.powi(-4).round().max(2.0))
    }

    /// `Δ(w) = −ε|w|^{−1/2} + ε c₀`; `Δ(0) = −∞`.
    #[inline]
    pub fn delta(&self, w: f64) -> f64 {
        self.epsilon * (self.c0 - w.abs().powf(-0.5))
    }

    /// `(T, Δ)` at `W = w`.
    pub fn transform(&self, w: f64) -> (f64, f64) {
        let d = self.delta(w);
        (w + d, d)
    }

    /// `Σ E|X_i|³ = E|Z|³/√n`
    pub fn sum_g3(&self) -> f64 {
        normal_abs_third_moment() / self.n.sqrt()
    }

    pub fn e_abs_delta(&self) -> Result<f64> {
        Ok(self.epsilon * kappa_delta()?)
    }

    pub fn e_abs_w_delta(&self) -> Result<f64> {
        Ok(self.epsilon * kappa_w()?)
    }

    /// `P(|Δ| > t)` in closed form through the normal distribution function.
    pub fn delta_tail(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        let s = t / self.epsilon;
        // |W|^{−1/2} > c₀ + s
        let a = (self.c0 + s).powi(-2);
        let mut p = normal_cdf_diff(-a, a);
        if self.c0 > s {
            // |W|^{−1/2} < c₀ − s
            let b = (self.c0 - s).powi(-2);
            p += 2.0 * normal_cdf(-b);
        }
        p.min(1.0)
    }

    /// `P(T ≤ ε c₀) = Φ(ε^{2/3})`
    pub fn prob_t_below_shift(&self) -> f64 {
        normal_cdf(self.epsilon.powf(2.0 / 3.0))
    }

    /// `α = E|Δ(W) − Δ(W')|` where `W, W'` share all summands but one, by
    /// nested quadrature.
    ///
    /// With `S = (W + W')/2` and `D = W − W'` independent, the inner integral
    /// over `S` at `|D| = d` is rescaled by `s = (d/2)u` and its `|u ∓ 1|^{−1/2}`
    /// singularities removed by `u = 1 ∓ t²`. The outer integral over `|D|` uses
    /// `|D| = σ_D w²`.
    pub fn alpha_quadrature(&self) -> Result<f64> {
        let n = self.n;
        let sigma_s = (1.0 - 0.5 / n).sqrt();
        let sigma_d = (2.0 / n).sqrt();
        let mut failure = None;
        let outer = integrate_with_breaks(
            |w| {
                if w == 0.0 {
                    return 0.0;
                }
                match inner_alpha(sigma_d * w * w, sigma_s) {
                    Ok(k) => 4.0 * w * w * normal_pdf(w * w) * k,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            &[0.0, 0.5, 1.0, 1.5, 2.0, 3.0],
            1e-11,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(self.epsilon * (2.0 * n).powf(-0.25) * outer.value)
    }

    /// Monte Carlo `α` via exchangeability: `W = R + X`, `W' = R + X̂`.
    pub fn alpha_mc(&self, replicates: usize, rng: &mut dyn RngCore) -> MomentEstimate {
        let n = self.n;
        let (sr, sx) = (((n - 1.0) / n).sqrt(), (1.0 / n).sqrt());
        let mut s = NeumaierSum::new();
        let mut s2 = NeumaierSum::new();
        for _ in 0..replicates {
            let r: f64 = sr * rng.sample::<f64, _>(StandardNormal);
            let x: f64 = sx * rng.sample::<f64, _>(StandardNormal);
            let xh: f64 = sx * rng.sample::<f64, _>(StandardNormal);
            let v = (self.delta(r + x) - self.delta(r + xh)).abs();
            if v.is_finite() {
                s.add(v);
                s2.add(v * v);
            }
        }
        let k = replicates as f64;
        let mean = s.value() / k;
        let var = (s2.value() / k - mean * mean).max(0.0);
        MomentEstimate { value: mean, std_error: (var / k).sqrt(), replicates: replicates as u64 }
    }
}

/// `K(d) = 2[∫₀¹ 2(1 − t/√(2−t²)) q(1−t²) dt + ∫₀^∞ 2(1 − t/√(t²+2)) q(1+t²) dt]`,
/// `q(u) = φ_S(d u / 2)`.
fn inner_alpha(d: f64, sigma_s: f64) -> Result<f64> {
    let q = |u: f64| {
        let x = d * u / (2.0 * sigma_s);
        normal_pdf(x) / sigma_s
    };
    let near = integrate(
        |t| {
            let r = (2.0 - t * t).sqrt();
            2.0 * (2.0 - 2.0 * t * t) / (r * (r + t)) * q(1.0 - t * t)
        },
        0.0,
        1.0,
        1e-12,
    )?
    .value;
    let t_max = (80.0 * sigma_s / d).sqrt() + 1.0;
    let mut pts = vec![0.0];
    let mut b = 1.0;
    while b < t_max {
        pts.push(b);
        b *= 2.0;
    }
    pts.push(t_max);
    let far = integrate_with_breaks(
        |t| {
            let r = (t * t + 2.0).sqrt();
            2.0 * 2.0 / (r * (r + t)) * q(1.0 + t * t)
        },
        &pts,
        1e-12,
    )?
    .value;
    Ok(2.0 * (near + far))
}

/// The Example 4.1 statistic as a model. `W` is drawn directly; one
/// representative index stands for the `n` exchangeable summands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example41Model {
    pub spec: Example41Spec,
}

impl Example41Model {
    pub fn new(spec: Example41Spec) -> Self {
        Self { spec }
    }
}

impl StatisticModel for Example41Model {
    fn id(&self) -> String {
        format!("example41:eps={:e}:n={:e}", self.spec.epsilon, self.spec.n)
    }

    fn size(&self) -> u64 {
        if self.spec.n >= u64::MAX as f64 {
            u64::MAX
        } else {
            self.spec.n as u64
        }
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        Observations::single(vec![rng.sample(StandardNormal)])
    }

    fn statistic(&self, data: &Observations) -> Result<f64> {
        Ok(self.spec.transform(data.groups[0][0]).0)
    }

    fn linear_terms(&self, _data: &Observations) -> Result<Vec<f64>> {
        Err(Error::UnsupportedModel(
            "per-index terms of this model are represented by one exchangeable index".into(),
        ))
    }

    fn draw_copy(&self, _i: usize, rng: &mut dyn RngCore) -> f64 {
        rng.sample::<f64, _>(StandardNormal) / self.spec.n.sqrt()
    }

    fn linear_part(&self) -> Result<LinearPart> {
        if self.spec.n > 2f64.powi(53) {
            return Err(Error::Capacity(format!("n = {:e} is too large to enumerate summands", self.spec.n)));
        }
        LinearPart::iid(self.spec.n as usize, SummandLaw::Normal { sd: self.spec.n.powf(-0.5) })
    }

    fn delta(&self, data: &Observations) -> Result<f64> {
        Ok(self.spec.delta(data.groups[0][0]))
    }

    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        let w = data.groups[0][0];
        let (t, delta) = self.spec.transform(w);
        let n = self.spec.n;
        let (g, delta_i) = match mode {
            None => (Vec::new(), Vec::new()),
            Some(mode) => {
                // X₁ | W ~ N(W/n, (1 − 1/n)/n)
                let z: f64 = rng.sample(StandardNormal);
                let x1 = w / n + ((1.0 - 1.0 / n) / n).sqrt() * z;
                let rest = w - x1;
                let w1 = match mode {
                    VariantMode::ZeroOut => rest,
                    VariantMode::Resample => rest + self.draw_copy(0, rng),
                };
                (vec![x1], vec![self.spec.delta(w1)])
            }
        };
        Ok(DecompositionSample { t, w, delta, g, delta_i, index_weight: if mode.is_some() { n } else { 1.0 } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c0_closed_form_agrees_with_quadrature() {
        assert!((c0() - 1.720_079_974_649_039).abs() < 1e-14);
        assert!((c0() - 1.720_09).abs() < 1e-4);
        assert!((c0() - c0_quadrature().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn transform_values() {
        let spec = Example41Spec::new(0.01, 1e4).unwrap();
        let w = 0.01f64.powf(2.0 / 3.0);
        assert!((spec.transform(w).0 - 0.01 * spec.c0).abs() < 1e-15);
        let (t, d) = spec.transform(1.0);
        assert!((d - 0.01 * (spec.c0 - 1.0)).abs() < 1e-16 && (t - 1.0072009).abs() < 1e-6);
        assert_eq!(spec.transform(0.0).0, f64::NEG_INFINITY);
        assert!(Example41Spec::new(1.0 / 32.0, 100.0).is_err());
    }

    #[test]
    fn kappa_reference_values() {
        assert!((kappa_delta().unwrap() - 0.924_230_234_236_271).abs() < 1e-11);
        assert!((kappa_w().unwrap() - 0.601_874_736_277_212).abs() < 1e-11);
    }

    #[test]
    fn kappas_match_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (kd, kw) = (kappa_delta().unwrap(), kappa_w().unwrap());
        let c = c0();
        let r = 400_000;
        let (mut a, mut b, mut b2) = (0.0, 0.0, 0.0);
        for _ in 0..r {
            let z: f64 = rng.sample(StandardNormal);
            let x = (c - z.abs().powf(-0.5)).abs();
            let y = z.abs() * x;
            a += x;
            b += y;
            b2 += y * y;
        }
        let r = r as f64;
        let (ma, mb) = (a / r, b / r);
        // |Z|^{−1/2} has infinite variance; compare loosely for κ_Δ.
        assert!((ma - kd).abs() < 0.02, "{ma} vs {kd}");
        let se = ((b2 / r - mb * mb) / r).sqrt();
        assert!((mb - kw).abs() < 4.0 * se, "{mb} vs {kw}");
    }

    #[test]
    fn delta_tail_matches_direct_evaluation() {
        let spec = Example41Spec::new(0.01, 1e4).unwrap();
        let t = 1.0 / 3.0;
        let a = (spec.c0 + t / 0.01).powi(-2);
        assert!((spec.delta_tail(t) - (2.0 * normal_cdf(a) - 1.0)).abs() < 1e-15);
        let small = spec.delta_tail(0.001);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = 200_000;
        let hits = (0..r).filter(|_| spec.delta(rng.sample(StandardNormal)).abs() > 0.001).count() as f64 / r as f64;
        let se = (small * (1.0 - small) / r as f64).sqrt();
        assert!((hits - small).abs() < 4.0 * se);
    }

    #[test]
    fn alpha_quadrature_matches_monte_carlo() {
        let spec = Example41Spec::new(0.01, 400.0).unwrap();
        let q = spec.alpha_quadrature().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mc = spec.alpha_mc(400_000, &mut rng);
        // The integrand has a heavy tail near W = 0; allow a wider band.
        assert!((mc.value - q).abs() < 6.0 * mc.std_error + 0.02 * q, "{mc:?} vs {q}");
        let double = Example41Spec::new(0.0125, 400.0).unwrap().alpha_quadrature().unwrap();
        assert!((double / q - 1.25).abs() < 1e-12);
    }

    #[test]
    fn representative_decomposition_is_consistent() {
        let model = Example41Model::new(Example41Spec::new(0.01, 100.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = model.sample_decomposition(&mut rng, Some(VariantMode::Resample)).unwrap();
        assert!(s.is_representative() && s.index_weight == 100.0);
        assert_eq!(s.g.len(), 1);
        assert!((s.t - s.w - s.delta).abs() < 1e-15);
        model.linear_part().unwrap().check_normalization(1e-9).unwrap();
    }
}
