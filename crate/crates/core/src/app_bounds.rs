//! Closed-form bounds for U-, multisample U- and L-statistics, and the
//! right-hand sides compared in the counterexample.

use crate::bound_core::{check_moment_order, BoundKind, BoundValue};
use crate::error::{Error, Result};
use crate::models::example41::{kappa_delta, kappa_w, Example41Spec};
use crate::models::lstat::LStatModel;
use crate::models::multisample::{multisample_sigma, MultiUStatSpec};
use crate::models::ustat::{ustat_moments, UStatSpec};
use crate::numeric::{bisect_increasing, normal_cdf_diff};
use serde::Serialize;

const ONE_PLUS_SQRT2: f64 = 1.0 + std::f64::consts::SQRT_2;

/// Moments entering the U-statistic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UStatBoundInputs {
    pub m: usize,
    pub n: usize,
    pub sigma: f64,
    pub sigma1: f64,
    pub p: f64,
    /// `E|g(X₁)|^p`
    pub g_abs_p: f64,
    /// Smallest `c` with `E g² I(|g| > c σ₁) ≤ σ₁²/2`.
    pub c0_trunc: f64,
    /// `E|h|^p`, when available.
    pub h_abs_p: Option<f64>,
}

impl UStatBoundInputs {
    pub fn from_spec(spec: &UStatSpec, p: f64) -> Result<Self> {
        check_moment_order(p)?;
        let mo = ustat_moments(spec, p)?;
        let g = spec.kernel.projection(spec.dist).expect("catalog kernel has a projection");
        let s1 = mo.sigma1;
        let half = 0.5 * s1 * s1;
        let tail = |c: f64| {
            let level = c * s1;
            spec.dist.expect_composed(|x| g(x), |v: f64| if v.abs() > level { v * v } else { 0.0 }, &[level])
        };
        let mut hi = 1.0;
        while tail(hi)? > half {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Numeric("no truncation level found for the projection".into()));
            }
        }
        let c0_trunc = bisect_increasing(0.0, hi, 1e-10, 1e-12, |c| Ok(tail(c)? <= half))?;
        let inp = Self {
            m: spec.m,
            n: spec.n,
            sigma: mo.sigma,
            sigma1: s1,
            p,
            g_abs_p: mo.g_abs_p,
            c0_trunc,
            h_abs_p: mo.h_abs_p,
        };
        inp.validate()?;
        Ok(inp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 2 && self.m < self.n) {
            return Err(Error::InvalidModel(format!("need 2 ≤ m < n, got m = {}, n = {}", self.m, self.n)));
        }
        if !(self.sigma1 > 0.0) {
            return Err(Error::Degenerate("σ₁ must be positive".into()));
        }
        check_moment_order(self.p)
    }

    /// Inputs of the kernel `c h`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            sigma: c * self.sigma,
            sigma1: c * self.sigma1,
            g_abs_p: c.powf(self.p) * self.g_abs_p,
            h_abs_p: self.h_abs_p.map(|h| c.powf(self.p) * h),
            ..*self
        }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    fn tail_dof(&self) -> f64 {
        (self.n - self.m + 1) as f64
    }

    /// `(1+√2)(m−1)σ / ((m(n−m+1))^{1/2} σ₁)`
    pub fn first_term(&self) -> f64 {
        ONE_PLUS_SQRT2 * (self.m - 1) as f64 * self.sigma / ((self.m as f64 * self.tail_dof()).sqrt() * self.sigma1)
    }

    /// `E|g|^p / (n^{(p−2)/2} σ₁^p)`
    fn moment_ratio(&self) -> f64 {
        self.g_abs_p / (self.nf().powf(0.5 * (self.p - 2.0)) * self.sigma1.powf(self.p))
    }
}

pub fn ustat_uniform_31(inp: &UStatBoundInputs) -> Result<BoundValue> {
    inp.validate()?;
    Ok(BoundValue::explicit(BoundKind::UStatUniform, inp.first_term() + inp.c0_trunc / inp.nf().sqrt(), 0.0))
}

pub fn ustat_normal_32(inp: &UStatBoundInputs) -> Result<BoundValue> {
    inp.validate()?;
    Ok(BoundValue::explicit(BoundKind::UStatNormal, inp.first_term() + 6.1 * inp.moment_ratio(), 0.0))
}

pub fn ustat_nonuniform_33(inp: &UStatBoundInputs, z: f64) -> Result<BoundValue> {
    inp.validate()?;
    let (m, s, s1, dof) = (inp.m as f64, inp.sigma, inp.sigma1, inp.tail_dof());
    let a = 1.0 + z.abs();
    let known = 9.0 * m * s * s / (a * a * dof * s1 * s1) + 13.5 * (-z.abs() / 3.0).exp() * m.sqrt() * s / (dof.sqrt() * s1);
    let c_coeff = a.powf(-inp.p) * inp.moment_ratio();
    Ok(BoundValue::with_constant(BoundKind::UStatNonUniform, known, c_coeff, 0.0))
}

pub fn ustat_nonuniform_34(inp: &UStatBoundInputs, z: f64) -> Result<BoundValue> {
    inp.validate()?;
    let h = inp
        .h_abs_p
        .ok_or_else(|| Error::UnsupportedModel("E|h|^p is required for the kernel-moment bound".into()))?;
    let a = (1.0 + z.abs()).powf(-inp.p);
    let c_coeff = a * ((inp.m as f64).sqrt() * h / (inp.tail_dof().sqrt() * inp.sigma1.powf(inp.p)) + inp.moment_ratio());
    Ok(BoundValue::with_constant(BoundKind::UStatNonUniformKernelMoment, 0.0, c_coeff, 0.0))
}

/// Recombined non-uniform form; `None` outside `|z| ≤ ((n−m+1)/m)^{1/2}`.
pub fn ustat_nonuniform_36(inp: &UStatBoundInputs, z: f64) -> Result<Option<BoundValue>> {
    inp.validate()?;
    let m = inp.m as f64;
    if z.abs() > (inp.tail_dof() / m).sqrt() {
        return Ok(None);
    }
    let a = 1.0 + z.abs();
    let c_coeff = m.sqrt() * inp.sigma * inp.sigma / (a.powi(3) * inp.tail_dof().sqrt() * inp.sigma1 * inp.sigma1)
        + a.powf(-inp.p) * inp.moment_ratio();
    Ok(Some(BoundValue::with_constant(BoundKind::UStatNonUniformRecombined, 0.0, c_coeff, 0.0)))
}

/// Moments entering the multisample bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiBoundInputs {
    pub arities: Vec<usize>,
    pub sizes: Vec<usize>,
    pub sigma: f64,
    pub sigma_nbar: f64,
    pub p: f64,
    /// `E|h_j|^p` per group.
    pub h_abs_p: Vec<f64>,
}

impl MultiBoundInputs {
    pub fn from_spec(spec: &MultiUStatSpec, p: f64) -> Result<Self> {
        check_moment_order(p)?;
        let s = multisample_sigma(spec)?;
        Ok(Self {
            arities: spec.arities.clone(),
            sizes: spec.sizes.clone(),
            sigma: s.sigma,
            sigma_nbar: s.sigma_nbar,
            p,
            h_abs_p: spec.projection_abs_moments(p)?,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            sigma: c * self.sigma,
            sigma_nbar: c * self.sigma_nbar,
            h_abs_p: self.h_abs_p.iter().map(|h| c.powf(self.p) * h).collect(),
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        check_moment_order(self.p)?;
        if !(self.sigma_nbar > 0.0) {
            return Err(Error::Degenerate("σ_n̄ must be positive".into()));
        }
        Ok(())
    }

    /// `Σ m_j²/n_j`
    fn design(&self) -> f64 {
        self.arities.iter().zip(&self.sizes).map(|(&m, &n)| (m * m) as f64 / n as f64).sum()
    }

    /// `Σ m_j^p E|h_j|^p / n_j^{p−1}`
    fn moment_sum(&self) -> f64 {
        self.arities
            .iter()
            .zip(&self.sizes)
            .zip(&self.h_abs_p)
            .map(|((&m, &n), &h)| (m as f64).powf(self.p) * h / (n as f64).powf(self.p - 1.0))
            .sum()
    }

    pub fn first_term(&self) -> f64 {
        ONE_PLUS_SQRT2 * self.sigma / self.sigma_nbar * self.design()
    }

    pub fn moment_term(&self) -> f64 {
        6.6 / self.sigma_nbar.powf(self.p) * self.moment_sum()
    }
}

pub fn multisample_37(inp: &MultiBoundInputs) -> Result<BoundValue> {
    inp.validate()?;
    Ok(BoundValue::explicit(BoundKind::MultiUniform, inp.first_term() + inp.moment_term(), 0.0))
}

pub fn multisample_38(inp: &MultiBoundInputs, z: f64) -> Result<BoundValue> {
    inp.validate()?;
    let a = 1.0 + z.abs();
    let r = inp.sigma / inp.sigma_nbar;
    let d = inp.design();
    let known = 9.0 * r * r * d * d / (a * a) + 13.5 * (-z.abs() / 3.0).exp() * r * d;
    let c_coeff = inp.moment_sum() / (a.powf(inp.p) * inp.sigma_nbar.powf(inp.p));
    Ok(BoundValue::with_constant(BoundKind::MultiNonUniform, known, c_coeff, 0.0))
}

/// Moments entering the L-statistic bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LStatBoundInputs {
    pub n: usize,
    /// Lipschitz constant of `J`.
    pub c0_lip: f64,
    /// `‖X₁‖₂`
    pub x_l2: f64,
    pub sigma: f64,
    pub p: f64,
    /// `E|g(X₁)|^p`
    pub g_abs_p: f64,
}

impl LStatBoundInputs {
    pub fn from_model(model: &LStatModel, p: f64) -> Result<Self> {
        check_moment_order(p)?;
        Ok(Self {
            n: model.spec.n,
            c0_lip: model.spec.weight.check_lipschitz()?,
            x_l2: model.spec.x_l2(),
            sigma: model.sigma(),
            p,
            g_abs_p: model.projection.abs_moment(model.spec.dist, p)?,
        })
    }

    /// Inputs for the observations `c X`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { x_l2: c * self.x_l2, sigma: c * self.sigma, g_abs_p: c.powf(self.p) * self.g_abs_p, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidModel(format!("L-statistic bounds need n ≥ 4, got {}", self.n)));
        }
        check_moment_order(self.p)
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `c₀ ‖X₁‖₂ / (√n σ)`
    pub fn lipschitz_ratio(&self) -> f64 {
        self.c0_lip * self.x_l2 / (self.nf().sqrt() * self.sigma)
    }

    /// `E|g|^p / (n^{(p−2)/2} σ^p)`
    pub fn moment_ratio(&self) -> f64 {
        self.g_abs_p / (self.nf().powf(0.5 * (self.p - 2.0)) * self.sigma.powf(self.p))
    }

    pub fn first_term(&self) -> f64 {
        ONE_PLUS_SQRT2 * self.lipschitz_ratio()
    }
}

pub fn lstat_310(inp: &LStatBoundInputs) -> Result<BoundValue> {
    inp.validate()?;
    Ok(BoundValue::explicit(BoundKind::LStatUniform, inp.first_term() + 6.1 * inp.moment_ratio(), 0.0))
}

pub fn lstat_311(inp: &LStatBoundInputs, z: f64) -> Result<BoundValue> {
    inp.validate()?;
    let a = 1.0 + z.abs();
    let known = 9.0 * inp.c0_lip * inp.c0_lip * inp.x_l2 * inp.x_l2 / (a * a * inp.nf() * inp.sigma * inp.sigma);
    let c_coeff = a.powf(-inp.p) * (inp.lipschitz_ratio() + inp.moment_ratio());
    Ok(BoundValue::with_constant(BoundKind::LStatNonUniform, known, c_coeff, 0.0))
}

/// `sup_z |P(W ≤ z) − Φ(z)| + 4 E|WΔ| + 4 E|Δ|`
pub fn shorack_rhs_46(e_abs_w_delta: f64, e_abs_delta: f64, linear_ks: f64) -> f64 {
    linear_ks + 4.0 * e_abs_w_delta + 4.0 * e_abs_delta
}

/// `E|Δ| + Σ E|g_i|³ + √α`
pub fn bg_bracket_47(e_abs_delta: f64, sum_g3: f64, alpha: f64) -> f64 {
    e_abs_delta + sum_g3 + alpha.max(0.0).sqrt()
}

/// Exact `P(T ≤ εc₀) − Φ(εc₀) = Φ(ε^{2/3}) − Φ(εc₀)`.
pub fn counterexample_lhs(spec: &Example41Spec) -> f64 {
    normal_cdf_diff(spec.epsilon * spec.c0, spec.epsilon.powf(2.0 / 3.0))
}

/// One row of the counterexample table, all from closed forms and quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub epsilon: f64,
    /// `n = ε^{−4}`
    pub n: f64,
    pub lhs_exact: f64,
    /// `ε^{2/3}/6`
    pub lhs_floor: f64,
    pub e_abs_w_delta: f64,
    pub e_abs_delta: f64,
    pub shorack_rhs: f64,
    pub alpha: f64,
    pub sum_g3: f64,
    pub bg_bracket: f64,
    pub ratio_shorack: f64,
    pub ratio_bg: f64,
}

pub fn counterexample_report(epsilons: &[f64]) -> Result<Vec<CounterexampleReport>> {
    let (kd, kw) = (kappa_delta()?, kappa_w()?);
    epsilons
        .iter()
        .map(|&eps| {
            let spec = Example41Spec::coupled(eps)?;
            let lhs_exact = counterexample_lhs(&spec);
            let (e_abs_delta, e_abs_w_delta) = (eps * kd, eps * kw);
            // W is exactly standard normal, so its own distance to Φ is zero.
            let shorack = shorack_rhs_46(e_abs_w_delta, e_abs_delta, 0.0);
            let alpha = spec.alpha_quadrature()?;
            let sum_g3 = spec.sum_g3();
            let bg = bg_bracket_47(e_abs_delta, sum_g3, alpha);
            Ok(CounterexampleReport {
                epsilon: eps,
                n: spec.n,
                lhs_exact,
                lhs_floor: eps.powf(2.0 / 3.0) / 6.0,
                e_abs_w_delta,
                e_abs_delta,
                shorack_rhs: shorack,
                alpha,
                sum_g3,
                bg_bracket: bg,
                ratio_shorack: lhs_exact / shorack,
                ratio_bg: lhs_exact / bg,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::models::lstat::{LStatSpec, Weight};
    use crate::models::ustat::Kernel;

    fn variance_inputs(n: usize) -> UStatBoundInputs {
        UStatBoundInputs::from_spec(&UStatSpec::new(Kernel::Variance, Distribution::StdNormal, n).unwrap(), 3.0).unwrap()
    }

    #[test]
    fn ustat_first_terms() {
        let v = variance_inputs(50);
        assert!((v.first_term() - 0.487_75).abs() < 1e-5, "{}", v.first_term());
        let s = UStatBoundInputs::from_spec(&UStatSpec::new(Kernel::Sum, Distribution::StdNormal, 50).unwrap(), 3.0).unwrap();
        assert!((s.first_term() - ONE_PLUS_SQRT2 * 2f64.sqrt() / 98f64.sqrt()).abs() < 1e-12);
        assert!((s.first_term() - 0.344_94).abs() < 1e-4);
        // E|g|³ = E|Z² − 1|³ / 8 for the variance kernel.
        let e = Distribution::StdNormal.expect(|x| (x * x - 1.0f64).abs().powi(3), &[-1.0, 1.0]).unwrap() / 8.0;
        assert!((v.g_abs_p - e).abs() < 1e-10);
    }

    #[test]
    fn truncation_constant_is_minimal() {
        let v = variance_inputs(50);
        let spec = UStatSpec::new(Kernel::Variance, Distribution::StdNormal, 50).unwrap();
        let g = spec.kernel.projection(spec.dist).unwrap();
        let tail = |c: f64| {
            let level = c * v.sigma1;
            Distribution::StdNormal
                .expect_composed(|x| g(x), |y: f64| if y.abs() > level { y * y } else { 0.0 }, &[level])
                .unwrap()
        };
        assert!(tail(v.c0_trunc) <= 0.25 + 1e-12);
        assert!(tail(v.c0_trunc * (1.0 - 1e-6)) > 0.25);
    }

    #[test]
    fn nonuniform_ustat_values() {
        let v = variance_inputs(50);
        let b = ustat_nonuniform_33(&v, 0.0).unwrap();
        assert!((b.known - (1.469_39 + 5.454_82)).abs() < 1e-4);
        assert!(b.is_trivial() && !b.is_verifiable());
        let b9 = ustat_nonuniform_33(&v, 9.0).unwrap();
        let expo = 13.5 * (-3.0f64).exp() * 2f64.sqrt() * 2.0 / 7.0;
        assert!((b9.known - 9.0 * 2.0 * 2.0 / (100.0 * 49.0 * 0.5) - expo).abs() < 1e-12);
        assert!(ustat_nonuniform_36(&v, 6.0).unwrap().is_none());
        assert!(ustat_nonuniform_36(&v, 4.9).unwrap().is_some());
    }

    #[test]
    fn multisample_values() {
        let spec = MultiUStatSpec::wilcoxon(Distribution::Uniform01, 1000, 1000).unwrap();
        let inp = MultiBoundInputs::from_spec(&spec, 3.0).unwrap();
        assert!((inp.first_term() - 0.187_00).abs() < 5e-6);
        assert!((inp.moment_term() - 0.191_71).abs() < 5e-6);
        assert!(multisample_37(&inp).unwrap().known < 0.379);
        let b = multisample_38(&inp, 0.0).unwrap();
        assert!((b.known - (0.054 + 1.0458)).abs() < 1e-3);
    }

    #[test]
    fn lstat_values() {
        let model = LStatModel::new(LStatSpec::new(Weight::Identity, Distribution::Uniform01, 400).unwrap()).unwrap();
        let inp = LStatBoundInputs::from_model(&model, 3.0).unwrap();
        let exact = ONE_PLUS_SQRT2 * (1.0f64 / 3.0).sqrt() * 45f64.sqrt() / 20.0;
        assert!((inp.first_term() - exact).abs() < 1e-12);
        assert!((inp.first_term() - 0.467_51).abs() < 1e-5);
        assert!((lstat_311(&inp, 0.0).unwrap().known - 0.3375).abs() < 1e-12);
        let small = LStatBoundInputs { n: 3, ..inp };
        assert!(lstat_310(&small).is_err());
        let mean = LStatModel::new(LStatSpec::new(Weight::Const1, Distribution::StdNormal, 100).unwrap()).unwrap();
        let m = LStatBoundInputs::from_model(&mean, 3.0).unwrap();
        assert_eq!(m.first_term(), 0.0);
        assert_eq!(lstat_311(&m, 2.0).unwrap().known, 0.0);
    }

    #[test]
    fn counterexample_rows() {
        let rows = counterexample_report(&[1e-3, 1e-5]).unwrap();
        assert!((rows[0].lhs_exact - 0.003_303).abs() < 1e-6);
        assert!(rows[0].lhs_exact >= rows[0].lhs_floor);
        assert!((rows[1].lhs_exact - 1.78e-4).abs() < 1e-6);
        assert!(rows[1].ratio_shorack > 1.0);
        assert!(Example41Spec::coupled(1.0 / 32.0).is_err());
        assert!(bg_bracket_47(0.0, 1.595_769_121_605_73 / 10.0, 0.0) > 0.0);
    }
}
