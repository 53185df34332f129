//! Seeded, order-independent Monte Carlo over decomposition samples.

mod accum;
mod ks;

pub use accum::{Accumulator, IndexMoments, Moments};
pub use ks::{
    dkw_radius, empirical_ks_two_sample, empirical_ks_vs_normal, ks_exact_discrete, rademacher_sum_law, sort_samples,
    KsResult,
};

use crate::bound_core::{BoundComponents, LinearPart, MomentEstimate, NonUniformInputs};
use crate::error::{Error, Result};
use crate::models::{DecompositionSample, StatisticModel, VariantMode};
use crate::numeric::sum::tree_merge;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Replicates handled sequentially by one task; fixed so that the merge
/// tree does not depend on the thread count.
pub const CHUNK: usize = 1024;

/// Default DKW confidence level.
pub const DEFAULT_ALPHA: f64 = 1e-4;

/// Master seed from which every replicate's stream is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Independent stream keyed by the replicate index.
    pub fn substream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index);
        rng
    }
}

/// Lazily evaluated replicates `0..r`, each on its own substream.
pub fn run_replicates<'a, M: StatisticModel + ?Sized>(
    model: &'a M,
    r: usize,
    seed: SeedSpec,
    mode: Option<VariantMode>,
) -> impl Iterator<Item = Result<DecompositionSample>> + 'a {
    (0..r as u64).map(move |i| model.sample_decomposition(&mut seed.substream(i), mode))
}

/// Settings of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub replicates: usize,
    pub seed: SeedSpec,
    pub mode: Option<VariantMode>,
    /// `0` lets the runtime choose.
    pub threads: usize,
    pub z_grid: Vec<f64>,
    /// Exponent for the `E|Δ|^p` accumulator.
    pub p: f64,
}

/// Output of a simulation: `T` and `W` in replicate order, plus accumulators.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub acc: Accumulator,
    pub z_grid: Vec<f64>,
}

struct Chunk {
    t: Vec<f64>,
    w: Vec<f64>,
    acc: Accumulator,
}

pub fn simulate<M: StatisticModel + ?Sized>(model: &M, run: &McRun) -> Result<Simulation> {
    if run.replicates == 0 {
        return Err(Error::Domain("at least one replicate is required".into()));
    }
    let chunks = run.replicates.div_ceil(CHUNK);
    let work = |c: usize| -> Result<Chunk> {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(run.replicates);
        let mut out = Chunk {
            t: Vec::with_capacity(hi - lo),
            w: Vec::with_capacity(hi - lo),
            acc: Accumulator::new(&run.z_grid, run.p),
        };
        for i in lo..hi {
            let s = model.sample_decomposition(&mut run.seed.substream(i as u64), run.mode)?;
            out.t.push(s.t);
            out.w.push(s.w);
            out.acc.add(&s);
        }
        Ok(out)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.threads)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    let parts: Vec<Chunk> = pool.install(|| (0..chunks).into_par_iter().map(work).collect::<Result<Vec<_>>>())?;
    let mut t = Vec::with_capacity(run.replicates);
    let mut w = Vec::with_capacity(run.replicates);
    let mut accs = Vec::with_capacity(parts.len());
    for part in parts {
        t.extend(part.t);
        w.extend(part.w);
        accs.push(part.acc);
    }
    let acc = tree_merge(accs, |a, b| a.merge(b)).expect("at least one chunk");
    Ok(Simulation { t, w, acc, z_grid: run.z_grid.clone() })
}

impl Simulation {
    pub fn replicates(&self) -> u64 {
        self.acc.count
    }

    /// One-sample distance of `T` from `Φ`.
    pub fn ks_t_vs_normal(&self, alpha: f64) -> KsResult {
        let mut t = self.t.clone();
        sort_samples(&mut t);
        empirical_ks_vs_normal(&t, alpha)
    }

    /// One-sample distance of `W` from `Φ`.
    pub fn ks_w_vs_normal(&self, alpha: f64) -> KsResult {
        let mut w = self.w.clone();
        sort_samples(&mut w);
        empirical_ks_vs_normal(&w, alpha)
    }

    /// Two-sample distance between `T` and `W`.
    pub fn ks_t_vs_w(&self, alpha: f64) -> KsResult {
        let (mut t, mut w) = (self.t.clone(), self.w.clone());
        sort_samples(&mut t);
        sort_samples(&mut w);
        empirical_ks_two_sample(&t, &w, alpha)
    }

    /// Plug-in components with the given `β` and `δ` of the linear part.
    pub fn components(&self, beta: MomentEstimate, delta: f64) -> BoundComponents {
        let a = &self.acc;
        let (wd, gdd, l2, gl2) = (a.e_abs_w_delta(), a.sum_g_delta_diff(), a.delta_l2(), a.sum_g_l2_delta_l2());
        BoundComponents {
            beta: beta.value,
            beta_se: beta.std_error,
            delta,
            delta_se: 0.0,
            e_abs_w_delta: wd.value,
            e_abs_w_delta_se: wd.std_error,
            sum_g_delta_diff: gdd.value,
            sum_g_delta_diff_se: gdd.std_error,
            delta_l2: l2.value,
            delta_l2_se: l2.std_error,
            sum_g_l2_delta_l2: gl2.value,
            sum_g_l2_delta_l2_se: gl2.std_error,
        }
    }

    /// Tail inputs of `γ_z` at grid point `k`: the `Δ` tail from the run,
    /// `P(|g_i| > ·)` from the linear part's oracles, and the product term
    /// with `P(|W − g_i| > ·)` estimated from the run.
    pub fn nonuniform_inputs(&self, k: usize, part: &LinearPart) -> Result<NonUniformInputs> {
        let z = self.z_grid[k];
        let dt = self.acc.delta_tail(k);
        let g_tail = part.tail_sum((z.abs() + 1.0) / 3.0)?;
        let mut cross = 0.0;
        let mut cross_se = 0.0;
        let mut offset = 0;
        let wg = if self.acc.has_variants { self.acc.w_minus_g_tail(k) } else { Vec::new() };
        for block in part.blocks() {
            let big = block.law.expect(&|g: f64| if g.abs() > 1.0 { 1.0 } else { 0.0 }, &[1.0])?;
            if big.value > 0.0 {
                if wg.is_empty() {
                    // No per-index draws: bound the first factor by one.
                    cross += block.count as f64 * big.value;
                    cross_se += block.count as f64 * big.std_error;
                } else if self.acc.index_weight != 1.0 {
                    let e = wg[0];
                    cross += self.acc.index_weight * e.value * big.value;
                    cross_se += self.acc.index_weight * (e.std_error * big.value + e.value * big.std_error);
                } else {
                    for e in &wg[offset..offset + block.count] {
                        cross += e.value * big.value;
                        cross_se += e.std_error * big.value + e.value * big.std_error;
                    }
                }
            }
            offset += block.count;
        }
        Ok(NonUniformInputs {
            z,
            p_delta_tail: dt.value,
            sum_p_g_tail: g_tail.value,
            sum_p_w_minus_g_tail: cross,
            std_error: dt.std_error + g_tail.std_error + cross_se,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::models::{LinearSumModel, UStatModel, UStatSpec, Kernel};

    fn run(r: usize, threads: usize, mode: Option<VariantMode>) -> McRun {
        McRun { replicates: r, seed: SeedSpec::new(42), mode, threads, z_grid: vec![0.0, 3.0], p: 3.0 }
    }

    #[test]
    fn single_replicate_reproduces_direct_sample() {
        let model = LinearSumModel::new(Distribution::StdNormal, 10).unwrap();
        let seed = SeedSpec::new(5);
        let direct = model.sample_decomposition(&mut seed.substream(0), None).unwrap();
        let via = run_replicates(&model, 1, seed, None).next().unwrap().unwrap();
        assert_eq!(direct, via);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let model = UStatModel::new(UStatSpec::new(Kernel::Variance, Distribution::StdNormal, 20).unwrap()).unwrap();
        let a = simulate(&model, &run(5000, 1, Some(VariantMode::ZeroOut))).unwrap();
        let b = simulate(&model, &run(5000, 4, Some(VariantMode::ZeroOut))).unwrap();
        assert_eq!(a.t, b.t);
        assert_eq!(a.acc, b.acc);
        assert_eq!(a.ks_t_vs_w(1e-4), b.ks_t_vs_w(1e-4));
    }

    #[test]
    fn linear_model_components_are_exact_zeros() {
        let model = LinearSumModel::new(Distribution::Rademacher, 100).unwrap();
        let sim = simulate(&model, &run(3000, 0, Some(VariantMode::ZeroOut))).unwrap();
        let c = sim.components(MomentEstimate::exact(0.1), 0.05);
        assert_eq!(
            (c.e_abs_w_delta, c.sum_g_delta_diff, c.delta_l2, c.sum_g_l2_delta_l2),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(sim.acc.delta_tail(0).value, 0.0);
    }

    #[test]
    fn mean_of_w_is_centered() {
        let model = LinearSumModel::new(Distribution::Rademacher, 100).unwrap();
        let r = 100_000;
        let sim = simulate(&model, &run(r, 0, None)).unwrap();
        assert!(sim.acc.w.mean(sim.acc.count).abs() < 4.0 / (r as f64).sqrt());
    }
}
