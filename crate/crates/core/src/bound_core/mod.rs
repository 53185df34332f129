//! General-theorem quantities for `T = W + Δ`: β, δ choices and the uniform
//! and non-uniform bounds with explicit constants.
//!
//! A uniform bound controls `sup_z |P(T ≤ z) − P(W ≤ z)|` (or the distance to
//! Φ); a non-uniform bound controls the same difference at a fixed `z` and
//! decays in `|z|`. Bounds whose statement involves an unspecified absolute
//! constant keep that part symbolic in [`BoundValue::c_coeff`].

mod delta;
mod linear_part;

pub use delta::{
    compute_beta, concentration_mass, delta_from_p_moment, delta_from_truncation, min_lower_bound_holds,
    solve_delta_minimal, truncated_second_moment, PMomentDelta, DELTA_REL_TOL,
};
pub use linear_part::{LinearPart, MomentEstimate, RealMap, SummandBlock, SummandLaw};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifies which bound a value instantiates. The string tags are the
/// selectors used in experiment configurations and result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundKind {
    ChebyshevBaseline,
    LinearBaseline,
    UniformDelta,
    UniformBeta,
    UniformNormal,
    NonUniformDelta,
    NonUniformMoment,
    UStatUniform,
    UStatNormal,
    UStatNonUniform,
    UStatNonUniformKernelMoment,
    UStatNonUniformRecombined,
    MultiUniform,
    MultiNonUniform,
    LStatUniform,
    LStatNonUniform,
    CounterexampleFloor,
    ComponentCap,
    ShorackRhs,
    BgBracket,
}

impl BoundKind {
    pub const ALL: [BoundKind; 20] = [
        Self::ChebyshevBaseline,
        Self::LinearBaseline,
        Self::UniformDelta,
        Self::UniformBeta,
        Self::UniformNormal,
        Self::NonUniformDelta,
        Self::NonUniformMoment,
        Self::UStatUniform,
        Self::UStatNormal,
        Self::UStatNonUniform,
        Self::UStatNonUniformKernelMoment,
        Self::UStatNonUniformRecombined,
        Self::MultiUniform,
        Self::MultiNonUniform,
        Self::LStatUniform,
        Self::LStatNonUniform,
        Self::CounterexampleFloor,
        Self::ComponentCap,
        Self::ShorackRhs,
        Self::BgBracket,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::ChebyshevBaseline => "eq1.3",
            Self::LinearBaseline => "eq1.4",
            Self::UniformDelta => "eq2.3",
            Self::UniformBeta => "eq2.4",
            Self::UniformNormal => "eq2.5",
            Self::NonUniformDelta => "eq2.6",
            Self::NonUniformMoment => "eq2.9",
            Self::UStatUniform => "eq3.1",
            Self::UStatNormal => "eq3.2",
            Self::UStatNonUniform => "eq3.3",
            Self::UStatNonUniformKernelMoment => "eq3.4",
            Self::UStatNonUniformRecombined => "eq3.6",
            Self::MultiUniform => "eq3.7",
            Self::MultiNonUniform => "eq3.8",
            Self::LStatUniform => "eq3.10",
            Self::LStatNonUniform => "eq3.11",
            Self::CounterexampleFloor => "eq4.2",
            Self::ComponentCap => "eq4.3",
            Self::ShorackRhs => "eq4.6",
            Self::BgBracket => "eq4.7",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn catalog() -> Vec<&'static str> {
        Self::ALL.iter().map(|k| k.tag()).collect()
    }

    /// Bounds compared against `Φ` (one-sample); the rest compare `T` with `W`.
    pub fn targets_normal(self) -> bool {
        !matches!(self, Self::UniformDelta | Self::UniformBeta | Self::NonUniformDelta | Self::UStatUniform)
    }

    /// Bounds stated at a single evaluation point `z`.
    pub fn is_pointwise(self) -> bool {
        matches!(
            self,
            Self::NonUniformDelta
                | Self::NonUniformMoment
                | Self::UStatNonUniform
                | Self::UStatNonUniformKernelMoment
                | Self::UStatNonUniformRecombined
                | Self::MultiNonUniform
                | Self::LStatNonUniform
        )
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Scalar ingredients of the general uniform and non-uniform bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComponents {
    pub beta: f64,
    pub beta_se: f64,
    pub delta: f64,
    pub delta_se: f64,
    /// `E|WΔ|`
    pub e_abs_w_delta: f64,
    pub e_abs_w_delta_se: f64,
    /// `Σ E|g_i(X_i)(Δ − Δ_i)|`
    pub sum_g_delta_diff: f64,
    pub sum_g_delta_diff_se: f64,
    /// `‖Δ‖₂`
    pub delta_l2: f64,
    pub delta_l2_se: f64,
    /// `Σ ‖g_i(X_i)‖₂ ‖Δ − Δ_i‖₂`
    pub sum_g_l2_delta_l2: f64,
    pub sum_g_l2_delta_l2_se: f64,
}

impl BoundComponents {
    /// Components of a purely linear statistic (`Δ ≡ 0`).
    pub fn linear(beta: MomentEstimate, delta: f64) -> Self {
        Self {
            beta: beta.value,
            beta_se: beta.std_error,
            delta,
            delta_se: 0.0,
            e_abs_w_delta: 0.0,
            e_abs_w_delta_se: 0.0,
            sum_g_delta_diff: 0.0,
            sum_g_delta_diff_se: 0.0,
            delta_l2: 0.0,
            delta_l2_se: 0.0,
            sum_g_l2_delta_l2: 0.0,
            sum_g_l2_delta_l2_se: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.beta,
            self.e_abs_w_delta,
            self.sum_g_delta_diff,
            self.delta_l2,
            self.sum_g_l2_delta_l2,
        ];
        if fields.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidModel(format!("bound components must be finite and nonnegative: {self:?}")));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidModel(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    fn remainder_terms(&self) -> (f64, f64) {
        (
            self.e_abs_w_delta + self.sum_g_delta_diff,
            self.e_abs_w_delta_se + self.sum_g_delta_diff_se,
        )
    }
}

/// A bound split into its explicit part and the coefficient of the
/// unspecified absolute constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub known: f64,
    pub c_coeff: f64,
    pub kind: BoundKind,
    /// First-order propagated standard error of `known`.
    pub std_error: f64,
}

impl BoundValue {
    pub fn explicit(kind: BoundKind, known: f64, std_error: f64) -> Self {
        Self { known, c_coeff: 0.0, kind, std_error }
    }

    pub fn with_constant(kind: BoundKind, known: f64, c_coeff: f64, std_error: f64) -> Self {
        Self { known, c_coeff, kind, std_error }
    }

    /// Only bounds free of the unspecified constant can be checked.
    pub fn is_verifiable(&self) -> bool {
        self.c_coeff == 0.0
    }

    /// The bound says nothing about a distance in `[0, 1]`.
    pub fn is_trivial(&self) -> bool {
        self.known >= 1.0
    }
}

/// Tail inputs of the non-uniform `γ_z` term at one point `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonUniformInputs {
    pub z: f64,
    /// `P(|Δ| > (|z|+1)/3)`
    pub p_delta_tail: f64,
    /// `Σ P(|g_i| > (|z|+1)/3)`
    pub sum_p_g_tail: f64,
    /// `Σ P(|W − g_i| > (|z|−2)/3) · P(|g_i| > 1)`
    pub sum_p_w_minus_g_tail: f64,
    pub std_error: f64,
}

impl NonUniformInputs {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_delta_tail) || self.sum_p_g_tail < 0.0 || self.sum_p_w_minus_g_tail < 0.0 {
            return Err(Error::Domain(format!("invalid tail probabilities: {self:?}")));
        }
        Ok(())
    }
}

pub fn uniform_bound_thm21(c: &BoundComponents) -> BoundValue {
    let (rest, rest_se) = c.remainder_terms();
    BoundValue::explicit(BoundKind::UniformDelta, 4.0 * c.delta + rest, 4.0 * c.delta_se + rest_se)
}

pub fn uniform_bound_beta(c: &BoundComponents) -> BoundValue {
    let (rest, rest_se) = c.remainder_terms();
    BoundValue::explicit(BoundKind::UniformBeta, 2.0 * c.beta + rest, 2.0 * c.beta_se + rest_se)
}

pub fn uniform_bound_normal(c: &BoundComponents) -> BoundValue {
    let (rest, rest_se) = c.remainder_terms();
    BoundValue::explicit(BoundKind::UniformNormal, 6.1 * c.beta + rest, 6.1 * c.beta_se + rest_se)
}

/// Berry–Esseen bound `4.1 β` for the linear part alone.
pub fn linear_baseline(part: &LinearPart) -> Result<BoundValue> {
    let beta = compute_beta(part)?;
    Ok(BoundValue::explicit(BoundKind::LinearBaseline, 4.1 * beta.value, 4.1 * beta.std_error))
}

/// Baseline obtained by bounding the remainder through its `p`-th moment.
pub fn chebyshev_baseline(linear_ks: f64, delta_p_moment: MomentEstimate, p: f64) -> Result<BoundValue> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("moment order p must be positive, got {p}")));
    }
    if delta_p_moment.value < 0.0 {
        return Err(Error::Domain("E|Δ|^p must be nonnegative".into()));
    }
    let e = 1.0 / (1.0 + p);
    let known = linear_ks + 2.0 * delta_p_moment.value.powf(e);
    let se = if delta_p_moment.std_error == 0.0 {
        0.0
    } else if delta_p_moment.value > 0.0 {
        2.0 * e * delta_p_moment.value.powf(e - 1.0) * delta_p_moment.std_error
    } else {
        2.0 * delta_p_moment.std_error.powf(e)
    };
    Ok(BoundValue::explicit(BoundKind::ChebyshevBaseline, known, se))
}

/// `γ_z` of the non-uniform bound.
pub fn nonuniform_gamma(inp: &NonUniformInputs) -> Result<MomentEstimate> {
    inp.validate()?;
    Ok(MomentEstimate {
        value: inp.p_delta_tail + inp.sum_p_g_tail + inp.sum_p_w_minus_g_tail,
        std_error: inp.std_error,
        replicates: 0,
    })
}

/// `τ = 22δ + 8.5‖Δ‖₂ + 3.6 Σ‖g_i‖₂‖Δ − Δ_i‖₂`.
pub fn nonuniform_tau(c: &BoundComponents) -> MomentEstimate {
    MomentEstimate {
        value: 22.0 * c.delta + 8.5 * c.delta_l2 + 3.6 * c.sum_g_l2_delta_l2,
        std_error: 22.0 * c.delta_se + 8.5 * c.delta_l2_se + 3.6 * c.sum_g_l2_delta_l2_se,
        replicates: 0,
    }
}

/// `γ_z + e^{−|z|/3} τ`, bounding `|P(T ≤ z) − P(W ≤ z)|`.
pub fn nonuniform_bound_thm22(gamma: MomentEstimate, tau: MomentEstimate, z: f64) -> BoundValue {
    let decay = (-z.abs() / 3.0).exp();
    BoundValue::explicit(
        BoundKind::NonUniformDelta,
        gamma.value + decay * tau.value,
        gamma.std_error + decay * tau.std_error,
    )
}

/// Non-uniform moment form: the `Δ`-tail probability is explicit, the rest
/// multiplies the unspecified constant.
pub fn nonuniform_moment_bound(
    p: f64,
    z: f64,
    delta_tail: f64,
    delta_l2: f64,
    sum_gl2_dl2: f64,
    sum_p_moment: f64,
) -> Result<BoundValue> {
    check_moment_order(p)?;
    let inputs = [delta_tail, delta_l2, sum_gl2_dl2, sum_p_moment, z];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite input to the non-uniform moment bound".into()));
    }
    let c_coeff = (1.0 + z.abs()).powf(-p) * (delta_l2 + sum_gl2_dl2 + sum_p_moment);
    Ok(BoundValue::with_constant(BoundKind::NonUniformMoment, delta_tail, c_coeff, 0.0))
}

/// Moment orders admitted by the `p`-moment bounds: `2 < p ≤ 3`.
pub fn check_moment_order(p: f64) -> Result<()> {
    if p > 2.0 && p <= 3.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("moment order p must lie in (2, 3], got {p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comps(beta: f64, delta: f64, wd: f64, sum: f64) -> BoundComponents {
        BoundComponents {
            e_abs_w_delta: wd,
            sum_g_delta_diff: sum,
            ..BoundComponents::linear(MomentEstimate::exact(beta), delta)
        }
    }

    #[test]
    fn uniform_formulas() {
        assert!((uniform_bound_thm21(&comps(0.1, 0.05, 0.0, 0.0)).known - 0.2).abs() < 1e-15);
        assert!((uniform_bound_thm21(&comps(0.1, 0.25, 0.1, 0.05)).known - 1.15).abs() < 1e-15);
        assert!((uniform_bound_beta(&comps(0.1, 0.05, 0.0, 0.0)).known - 0.2).abs() < 1e-15);
        let b = uniform_bound_beta(&comps(0.6, 0.3, 0.0, 0.0));
        assert!((b.known - 1.2).abs() < 1e-15 && b.is_trivial());
        assert!((uniform_bound_normal(&comps(0.1, 0.05, 0.0, 0.0)).known - 0.61).abs() < 1e-15);
    }

    #[test]
    fn beta_form_matches_delta_form_at_half_beta() {
        for &(beta, wd, sum) in &[(0.1, 0.0, 0.0), (0.3, 0.02, 0.07), (0.5, 0.1, 0.1)] {
            let c = comps(beta, beta / 2.0, wd, sum);
            assert_eq!(uniform_bound_beta(&c).known, uniform_bound_thm21(&c).known);
        }
    }

    #[test]
    fn normal_form_is_beta_form_plus_linear_baseline() {
        let c = comps(0.37, 0.1, 0.02, 0.03);
        let gap = uniform_bound_normal(&c).known - uniform_bound_beta(&c).known;
        assert!((gap - 4.1 * 0.37).abs() < 1e-15);
    }

    #[test]
    fn chebyshev() {
        let zero = chebyshev_baseline(0.41, MomentEstimate::exact(0.0), 2.0).unwrap();
        assert_eq!(zero.known, 0.41);
        let b = chebyshev_baseline(0.41, MomentEstimate::exact(0.01), 2.0).unwrap();
        assert!((b.known - (0.41 + 2.0 * 0.01f64.powf(1.0 / 3.0))).abs() < 1e-15);
        assert!((b.known - 0.8409).abs() < 1e-4);
        assert!(chebyshev_baseline(0.0, MomentEstimate::exact(0.1), 0.0).is_err());
    }

    #[test]
    fn tau_and_nonuniform() {
        let c = comps(0.1, 0.05, 0.0, 0.0);
        assert!((nonuniform_tau(&c).value - 1.1).abs() < 1e-15);
        let c2 = BoundComponents { delta_l2: 0.1, sum_g_l2_delta_l2: 0.02, ..c };
        assert!((nonuniform_tau(&c2).value - 2.022).abs() < 1e-14);
        let b = nonuniform_bound_thm22(MomentEstimate::exact(0.0), nonuniform_tau(&c), 3.0);
        assert!((b.known - (-1f64).exp() * 1.1).abs() < 1e-15);
        assert!((b.known - 0.4047).abs() < 1e-4);
        let minus = nonuniform_bound_thm22(MomentEstimate::exact(0.0), nonuniform_tau(&c), -3.0);
        assert_eq!(b.known, minus.known);
    }

    #[test]
    fn moment_bound_decay() {
        let b0 = nonuniform_moment_bound(3.0, 0.0, 0.0, 0.0, 0.0, 0.1).unwrap();
        assert_eq!(b0.known, 0.0);
        assert!((b0.c_coeff - 0.1).abs() < 1e-15);
        let b9 = nonuniform_moment_bound(3.0, 9.0, 0.0, 0.0, 0.0, 0.1).unwrap();
        assert!((b9.c_coeff - 1e-4).abs() < 1e-18);
        assert!(!b9.is_verifiable());
        assert!(nonuniform_moment_bound(3.5, 0.0, 0.0, 0.0, 0.0, 0.1).is_err());
        assert!(nonuniform_moment_bound(2.0, 0.0, 0.0, 0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn gamma_sums_terms() {
        let g = nonuniform_gamma(&NonUniformInputs {
            z: 1.0,
            p_delta_tail: 0.1,
            sum_p_g_tail: 0.2,
            sum_p_w_minus_g_tail: 0.05,
            std_error: 0.0,
        })
        .unwrap();
        assert!((g.value - 0.35).abs() < 1e-15);
    }

    #[test]
    fn tags_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(BoundKind::from_tag(k.tag()), Some(k));
        }
        assert_eq!(BoundKind::from_tag("eq9.9"), None);
    }
}
