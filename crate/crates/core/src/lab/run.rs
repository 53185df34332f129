//! The four experiment commands.

use super::config::{DeltaMethod, ExperimentConfig, SweepAxis};
use super::output::{Example41Row, ResultRow};
use crate::app_bounds::{
    bg_bracket_47, counterexample_report, lstat_310, lstat_311, multisample_37, multisample_38, shorack_rhs_46,
    ustat_nonuniform_33, ustat_nonuniform_34, ustat_nonuniform_36, ustat_normal_32, ustat_uniform_31, LStatBoundInputs,
    MultiBoundInputs, UStatBoundInputs,
};
use crate::bound_core::{
    chebyshev_baseline, compute_beta, delta_from_p_moment, delta_from_truncation, linear_baseline,
    nonuniform_bound_thm22, nonuniform_gamma, nonuniform_moment_bound, nonuniform_tau, solve_delta_minimal,
    uniform_bound_beta, uniform_bound_normal, uniform_bound_thm21, BoundKind, BoundValue, LinearPart, MomentEstimate,
    DELTA_REL_TOL,
};
use crate::error::{Error, Result};
use crate::mc::{dkw_radius, empirical_ks_two_sample, empirical_ks_vs_normal, simulate, sort_samples, McRun, SeedSpec, DEFAULT_ALPHA};
use crate::models::example41::{kappa_delta, kappa_w};
use crate::models::{CatalogModel, Example41Model, Example41Spec, ModelDescriptor, StatisticModel, VariantMode};
use crate::numeric::normal_cdf;
use std::collections::HashMap;

/// Smallest ε at which `example41` adds a Monte Carlo cross-check.
pub const EXAMPLE41_MC_MIN_EPSILON: f64 = 1e-2;

/// Rows of a command plus the per-row failures that did not stop it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report<R> {
    pub rows: Vec<R>,
    pub errors: Vec<String>,
}

impl<R> Default for Report<R> {
    fn default() -> Self {
        Self { rows: Vec::new(), errors: Vec::new() }
    }
}

impl Report<ResultRow> {
    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.pass == Some(false))
    }
}

impl Report<Example41Row> {
    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.lhs_exact < r.lhs_floor || r.mc_pass == Some(false))
    }
}

/// Bound values only; Monte Carlo is used solely for moment estimation.
pub fn cmd_bound(cfg: &ExperimentConfig) -> Result<Report<ResultRow>> {
    Runner::new(cfg)?.run(false)
}

/// Bound values checked against empirical distances.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Report<ResultRow>> {
    Runner::new(cfg)?.run(true)
}

pub fn cmd_example41(cfg: &ExperimentConfig) -> Result<Report<Example41Row>> {
    let (kd, kw) = (kappa_delta()?, kappa_w()?);
    let mut out = Report::default();
    for rep in counterexample_report(&cfg.epsilons)? {
        let eps = rep.epsilon;
        let mut row = Example41Row {
            epsilon: eps,
            n: rep.n,
            lhs_exact: rep.lhs_exact,
            lhs_floor: rep.lhs_floor,
            e_abs_w_delta: rep.e_abs_w_delta,
            e_abs_delta: rep.e_abs_delta,
            component_cap: 7.0 * eps,
            shorack_rhs: rep.shorack_rhs,
            alpha: rep.alpha,
            sum_g3: rep.sum_g3,
            bg_bracket: rep.bg_bracket,
            ratio_shorack: rep.ratio_shorack,
            ratio_bg: rep.ratio_bg,
            mc_replicates: None,
            mc_prob: None,
            mc_prob_se: None,
            mc_components: None,
            mc_components_se: None,
            mc_pass: None,
        };
        if eps >= EXAMPLE41_MC_MIN_EPSILON {
            let spec = Example41Spec::coupled(eps)?;
            let model = Example41Model::new(spec);
            let sim = simulate(&model, &mc_run(cfg, None))?;
            let r = sim.replicates() as f64;
            let shift = eps * spec.c0;
            let prob = sim.t.iter().filter(|&&t| t <= shift).count() as f64 / r;
            let prob_se = (prob * (1.0 - prob) / r).sqrt();
            let comp = sim.acc.e_abs_w_delta().plus(sim.acc.e_abs_delta());
            let quad = eps * (kd + kw);
            row.mc_replicates = Some(sim.replicates());
            row.mc_prob = Some(prob);
            row.mc_prob_se = Some(prob_se);
            row.mc_components = Some(comp.value);
            row.mc_components_se = Some(comp.std_error);
            row.mc_pass = Some(
                (prob - spec.prob_t_below_shift()).abs() <= 4.0 * prob_se
                    && (comp.value - quad).abs() <= 4.0 * comp.std_error
                    && comp.value <= row.component_cap,
            );
        }
        out.rows.push(row);
    }
    Ok(out)
}

/// `bound` or `verify` at every point of the configured grid.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Report<ResultRow>> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Domain("no sweep block configured".into()))?;
    let mut out = Report::default();
    for &v in &sweep.values {
        let mut point = cfg.clone();
        let model = point.model.as_ref().ok_or_else(|| Error::Domain("sweep needs a model".into()))?;
        match sweep.axis {
            SweepAxis::N => point.model = Some(model.with_n(v as usize)),
            SweepAxis::Epsilon => point.model = Some(model.with_epsilon(v)?),
            SweepAxis::Z => point.z_grid = vec![v],
            SweepAxis::Replicates => point.mc.replicates = v as usize,
        }
        let rep = match Runner::new(&point).and_then(|r| r.run(sweep.verify)) {
            Ok(r) => r,
            Err(e) => {
                out.errors.push(format!("{}={v}: {e}", sweep.axis.name()));
                continue;
            }
        };
        out.rows.extend(rep.rows);
        out.errors.extend(rep.errors);
    }
    Ok(out)
}

fn mc_run(cfg: &ExperimentConfig, mode: Option<VariantMode>) -> McRun {
    McRun {
        replicates: cfg.mc.replicates,
        seed: SeedSpec::new(cfg.mc.seed),
        mode,
        threads: cfg.mc.threads,
        z_grid: cfg.z_grid.clone(),
        p: cfg.p,
    }
}

/// Sorted draws of `T` and `W` with the run's accumulators.
struct Sample {
    sim: crate::mc::Simulation,
    t: Vec<f64>,
    w: Vec<f64>,
}

impl Sample {
    fn ecdf(sorted: &[f64], z: f64) -> f64 {
        sorted.partition_point(|&x| x <= z) as f64 / sorted.len() as f64
    }

    fn radius(&self) -> f64 {
        dkw_radius(self.sim.replicates(), DEFAULT_ALPHA)
    }
}

/// What a row's empirical column measures.
#[derive(Clone, Copy)]
enum Target {
    TvsNormal,
    TvsW,
    WvsNormal,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    desc: ModelDescriptor,
    model: CatalogModel,
    samples: HashMap<Option<VariantMode>, Sample>,
    part: Option<(LinearPart, MomentEstimate, f64)>,
    ustat: Option<UStatBoundInputs>,
    multi: Option<MultiBoundInputs>,
    lstat: Option<LStatBoundInputs>,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let desc = cfg.model.clone().ok_or_else(|| Error::Domain("this command needs a model".into()))?;
        let model = desc.build()?;
        Ok(Self { cfg, desc, model, samples: HashMap::new(), part: None, ustat: None, multi: None, lstat: None })
    }

    fn run(mut self, verify: bool) -> Result<Report<ResultRow>> {
        let mut out = Report::default();
        for &kind in &self.cfg.bounds {
            let points: Vec<Option<(usize, f64)>> = if kind.is_pointwise() {
                self.cfg.z_grid.iter().copied().enumerate().map(Some).collect()
            } else {
                vec![None]
            };
            for pt in points {
                match self.row(kind, pt, verify) {
                    Ok(Some(r)) => out.rows.push(r),
                    Ok(None) => {}
                    Err(e) => {
                        let at = pt.map(|(_, z)| format!(" at z={z}")).unwrap_or_default();
                        out.errors.push(format!("{kind} for {}{at}: {e}", self.model.id()));
                    }
                }
            }
        }
        Ok(out)
    }

    fn sample(&mut self, mode: Option<VariantMode>) -> Result<&Sample> {
        if !self.samples.contains_key(&mode) {
            let sim = simulate(&self.model, &mc_run(self.cfg, mode))?;
            let (mut t, mut w) = (sim.t.clone(), sim.w.clone());
            sort_samples(&mut t);
            sort_samples(&mut w);
            self.samples.insert(mode, Sample { sim, t, w });
        }
        Ok(&self.samples[&mode])
    }

    /// Linear part with its `β` and the configured δ.
    fn linear(&mut self) -> Result<&(LinearPart, MomentEstimate, f64)> {
        if self.part.is_none() {
            let part = self.model.linear_part()?;
            let beta = compute_beta(&part)?;
            let delta = match self.cfg.delta {
                DeltaMethod::Minimal => solve_delta_minimal(&part, DELTA_REL_TOL)?,
                DeltaMethod::Truncation => delta_from_truncation(&part)?,
                DeltaMethod::PMoment => delta_from_p_moment(self.cfg.p, part.abs_moment_sum(self.cfg.p)?.value)?.delta,
            };
            self.part = Some((part, beta, delta));
        }
        Ok(self.part.as_ref().expect("just set"))
    }

    fn ustat_inputs(&mut self) -> Result<UStatBoundInputs> {
        if self.ustat.is_none() {
            let CatalogModel::UStat(m) = &self.model else { return Err(wrong(self.desc.kind())) };
            self.ustat = Some(UStatBoundInputs::from_spec(&m.spec, self.cfg.p)?);
        }
        Ok(self.ustat.expect("just set"))
    }

    fn multi_inputs(&mut self) -> Result<MultiBoundInputs> {
        if self.multi.is_none() {
            let CatalogModel::Multi(m) = &self.model else { return Err(wrong(self.desc.kind())) };
            self.multi = Some(MultiBoundInputs::from_spec(&m.spec, self.cfg.p)?);
        }
        Ok(self.multi.clone().expect("just set"))
    }

    fn lstat_inputs(&mut self) -> Result<LStatBoundInputs> {
        if self.lstat.is_none() {
            let CatalogModel::LStat(m) = &self.model else { return Err(wrong(self.desc.kind())) };
            self.lstat = Some(LStatBoundInputs::from_model(m, self.cfg.p)?);
        }
        Ok(self.lstat.expect("just set"))
    }

    fn base(&self, kind: BoundKind, z: Option<f64>, b: &BoundValue) -> ResultRow {
        let epsilon = match self.desc {
            ModelDescriptor::Example41 { epsilon, .. } => Some(epsilon),
            _ => None,
        };
        ResultRow {
            equation_tag: kind.tag().to_string(),
            model: self.model.id(),
            n: self.desc.n(),
            m: self.model.arity(),
            z,
            epsilon,
            p: uses_p(kind).then_some(self.cfg.p),
            bound_known: b.known,
            bound_c_coeff: b.c_coeff,
            empirical: None,
            dkw_radius: None,
            se: Some(b.std_error),
            pass: None,
        }
    }

    fn row(&mut self, kind: BoundKind, pt: Option<(usize, f64)>, verify: bool) -> Result<Option<ResultRow>> {
        use BoundKind::*;
        let z = pt.map(|(_, z)| z);
        let zv = z.unwrap_or(0.0);
        let p = self.cfg.p;
        let variant = self.cfg.variant;
        let (bound, target, mode) = match kind {
            LinearBaseline => {
                let (part, _, _) = self.linear()?;
                (linear_baseline(part)?, Target::WvsNormal, None)
            }
            ChebyshevBaseline => {
                let lin = linear_baseline(&self.linear()?.0)?;
                let dp = self.sample(None)?.sim.acc.e_abs_delta_p();
                let mut b = chebyshev_baseline(lin.known, dp, p)?;
                b.std_error += lin.std_error;
                (b, Target::TvsNormal, None)
            }
            UniformDelta | UniformBeta | UniformNormal => {
                let (_, beta, delta) = *self.linear()?;
                let c = self.sample(Some(variant))?.sim.components(beta, delta);
                c.validate()?;
                let b = match kind {
                    UniformDelta => uniform_bound_thm21(&c),
                    UniformBeta => uniform_bound_beta(&c),
                    _ => uniform_bound_normal(&c),
                };
                let target = if kind == UniformNormal { Target::TvsNormal } else { Target::TvsW };
                (b, target, Some(variant))
            }
            NonUniformDelta | NonUniformMoment => {
                let k = pt.expect("pointwise").0;
                let (part, beta, delta) = self.linear()?.clone();
                let s = self.sample(Some(VariantMode::Resample))?;
                let c = s.sim.components(beta, delta);
                let b = if kind == NonUniformDelta {
                    let gamma = nonuniform_gamma(&s.sim.nonuniform_inputs(k, &part)?)?;
                    nonuniform_bound_thm22(gamma, nonuniform_tau(&c), zv)
                } else {
                    let dt = s.sim.acc.delta_tail(k);
                    let mut b = nonuniform_moment_bound(p, zv, dt.value, c.delta_l2, c.sum_g_l2_delta_l2, part.abs_moment_sum(p)?.value)?;
                    b.std_error = dt.std_error;
                    b
                };
                let target = if kind == NonUniformDelta { Target::TvsW } else { Target::TvsNormal };
                (b, target, Some(VariantMode::Resample))
            }
            UStatUniform => (ustat_uniform_31(&self.ustat_inputs()?)?, Target::TvsW, None),
            UStatNormal => (ustat_normal_32(&self.ustat_inputs()?)?, Target::TvsNormal, None),
            UStatNonUniform => (ustat_nonuniform_33(&self.ustat_inputs()?, zv)?, Target::TvsNormal, None),
            UStatNonUniformKernelMoment => (ustat_nonuniform_34(&self.ustat_inputs()?, zv)?, Target::TvsNormal, None),
            UStatNonUniformRecombined => match ustat_nonuniform_36(&self.ustat_inputs()?, zv)? {
                Some(b) => (b, Target::TvsNormal, None),
                None => return Ok(None),
            },
            MultiUniform => (multisample_37(&self.multi_inputs()?)?, Target::TvsNormal, None),
            MultiNonUniform => (multisample_38(&self.multi_inputs()?, zv)?, Target::TvsNormal, None),
            LStatUniform => (lstat_310(&self.lstat_inputs()?)?, Target::TvsNormal, None),
            LStatNonUniform => (lstat_311(&self.lstat_inputs()?, zv)?, Target::TvsNormal, None),
            CounterexampleFloor | ComponentCap | ShorackRhs | BgBracket => return self.example41_row(kind, verify).map(Some),
        };
        let mut row = self.base(kind, z, &bound);
        if verify {
            let s = self.sample(mode)?;
            let (empirical, radius) = match (target, z) {
                (Target::TvsNormal, None) => {
                    let ks = empirical_ks_vs_normal(&s.t, DEFAULT_ALPHA);
                    (ks.distance, ks.dkw_radius)
                }
                (Target::WvsNormal, _) => {
                    let ks = empirical_ks_vs_normal(&s.w, DEFAULT_ALPHA);
                    (ks.distance, ks.dkw_radius)
                }
                (Target::TvsW, None) => {
                    let ks = empirical_ks_two_sample(&s.t, &s.w, DEFAULT_ALPHA);
                    (ks.distance, ks.dkw_radius)
                }
                (Target::TvsNormal, Some(z)) => ((Sample::ecdf(&s.t, z) - normal_cdf(z)).abs(), s.radius()),
                (Target::TvsW, Some(z)) => ((Sample::ecdf(&s.t, z) - Sample::ecdf(&s.w, z)).abs(), 2.0 * s.radius()),
            };
            row.empirical = Some(empirical);
            row.dkw_radius = Some(radius);
            row.pass = bound.is_verifiable().then(|| empirical <= bound.known + radius + 3.0 * bound.std_error);
        }
        Ok(Some(row))
    }

    /// Counterexample rows. In `bound` mode the empirical column of eq4.2 and
    /// eq4.3 holds the exact left-hand side.
    fn example41_row(&mut self, kind: BoundKind, verify: bool) -> Result<ResultRow> {
        let CatalogModel::Example41(m) = &self.model else { return Err(wrong(self.desc.kind())) };
        let spec = m.spec;
        let eps = spec.epsilon;
        let (kd, kw) = (kappa_delta()?, kappa_w()?);
        let floor = eps.powf(2.0 / 3.0) / 6.0;
        let bracket = || -> Result<f64> { Ok(bg_bracket_47(eps * kd, spec.sum_g3(), spec.alpha_quadrature()?)) };
        let bound = match kind {
            BoundKind::CounterexampleFloor => BoundValue::explicit(kind, floor, 0.0),
            BoundKind::ComponentCap => BoundValue::explicit(kind, 7.0 * eps, 0.0),
            BoundKind::ShorackRhs => BoundValue::explicit(kind, shorack_rhs_46(eps * kw, eps * kd, 0.0), 0.0),
            _ => BoundValue::with_constant(kind, 0.0, bracket()?, 0.0),
        };
        let mut row = self.base(kind, None, &bound);
        if !verify {
            row.empirical = match kind {
                BoundKind::CounterexampleFloor => Some(crate::app_bounds::counterexample_lhs(&spec)),
                BoundKind::ComponentCap => Some(eps * (kd + kw)),
                _ => None,
            };
            return Ok(row);
        }
        let s = self.sample(None)?;
        let acc = &s.sim.acc;
        let r = s.sim.replicates() as f64;
        let radius = s.radius();
        match kind {
            BoundKind::CounterexampleFloor => {
                let shift = eps * spec.c0;
                let prob = Sample::ecdf(&s.t, shift);
                let se = (prob * (1.0 - prob) / r).sqrt();
                let lhs = prob - normal_cdf(shift);
                row.empirical = Some(lhs);
                row.dkw_radius = Some(radius);
                row.se = Some(se);
                // A lower bound: the measured gap must reach the floor.
                row.pass = Some(lhs + radius + 3.0 * se >= floor);
            }
            BoundKind::ComponentCap => {
                let comp = acc.e_abs_w_delta().plus(acc.e_abs_delta());
                row.empirical = Some(comp.value);
                row.se = Some(comp.std_error);
                row.pass = Some(comp.value <= bound.known + 3.0 * comp.std_error);
            }
            _ => {
                let ks = empirical_ks_vs_normal(&s.t, DEFAULT_ALPHA);
                row.empirical = Some(ks.distance);
                row.dkw_radius = Some(ks.dkw_radius);
                if kind == BoundKind::ShorackRhs {
                    let (wd, d) = (acc.e_abs_w_delta(), acc.e_abs_delta());
                    row.bound_known = shorack_rhs_46(wd.value, d.value, 0.0);
                    let se = 4.0 * (wd.std_error + d.std_error);
                    row.se = Some(se);
                    row.pass = Some(ks.distance <= row.bound_known + ks.dkw_radius + 3.0 * se);
                }
            }
        }
        Ok(row)
    }
}

fn wrong(kind: &str) -> Error {
    Error::UnsupportedModel(format!("bound does not apply to {kind} models"))
}

fn uses_p(kind: BoundKind) -> bool {
    use BoundKind::*;
    matches!(
        kind,
        ChebyshevBaseline
            | NonUniformMoment
            | UStatNormal
            | UStatNonUniform
            | UStatNonUniformKernelMoment
            | UStatNonUniformRecombined
            | MultiUniform
            | MultiNonUniform
            | LStatUniform
            | LStatNonUniform
    )
}
