//! Built-in statistics exposed through the common decomposition
//! `T = W + Δ` with `W = Σ g_i(X_i)` normalized to unit variance.

mod catalog;
mod combin;
pub mod example41;
pub mod linear;
pub mod lstat;
pub mod multisample;
pub mod ustat;

pub use catalog::{CatalogModel, ModelDescriptor};
pub use combin::{binomial, for_each_combination, ENUMERATION_CAP};
pub use example41::{Example41Model, Example41Spec};
pub use linear::LinearSumModel;
pub use lstat::{LStatModel, LStatProjection, LStatSpec, Weight};
pub use multisample::{MultiKernel, MultiUStatModel, MultiUStatSpec, MultisampleSigma};
pub use ustat::{Kernel, UStatModel, UStatMoments, UStatSpec};

use crate::bound_core::LinearPart;
use crate::error::{Error, Result};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// How the leave-one-out remainders `Δ_i` are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantMode {
    /// `X_i` replaced by `0`.
    ZeroOut,
    /// `X_i` replaced by an independent copy `X̂_i`.
    Resample,
}

/// Raw observations, one vector per independent sample group.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub groups: Vec<Vec<f64>>,
}

impl Observations {
    pub fn single(xs: Vec<f64>) -> Self {
        Self { groups: vec![xs] }
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Map a flat index onto `(group, position)`.
    pub fn locate(&self, mut i: usize) -> Option<(usize, usize)> {
        for (j, g) in self.groups.iter().enumerate() {
            if i < g.len() {
                return Some((j, i));
            }
            i -= g.len();
        }
        None
    }

    pub fn with_replacement(&self, i: usize, value: f64) -> Result<Self> {
        let (j, k) = self
            .locate(i)
            .ok_or_else(|| Error::Domain(format!("index {i} outside the {} observations", self.len())))?;
        let mut out = self.clone();
        out.groups[j][k] = value;
        Ok(out)
    }
}

/// One realization of the decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSample {
    pub t: f64,
    pub w: f64,
    pub delta: f64,
    /// `g_i(X_i)` for the listed indices.
    pub g: Vec<f64>,
    /// `Δ_i` for the listed indices; empty when no variant was requested.
    pub delta_i: Vec<f64>,
    /// Multiplicity of each listed index: 1, or `n` when a single
    /// representative index stands for `n` exchangeable ones.
    pub index_weight: f64,
}

impl DecompositionSample {
    pub fn is_representative(&self) -> bool {
        self.index_weight != 1.0
    }
}

/// Common interface of the built-in statistics.
pub trait StatisticModel: Send + Sync {
    /// Stable identifier used in result files.
    fn id(&self) -> String;

    /// Number of independent indices `n`.
    fn size(&self) -> u64;

    /// Kernel arity, where meaningful.
    fn arity(&self) -> Option<u64> {
        None
    }

    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations;

    /// The normalized statistic `T`.
    fn statistic(&self, data: &Observations) -> Result<f64>;

    /// `g_i(X_i)` for every index, already normalized.
    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>>;

    /// Draw an independent copy of `X_i`.
    fn draw_copy(&self, i: usize, rng: &mut dyn RngCore) -> f64;

    /// Laws of the linear summands, for β and δ.
    fn linear_part(&self) -> Result<LinearPart>;

    /// `Δ = T − W`.
    fn delta(&self, data: &Observations) -> Result<f64> {
        let w: f64 = self.linear_terms(data)?.iter().sum();
        Ok(self.statistic(data)? - w)
    }

    /// `Δ` recomputed with `X_i` replaced by `value`.
    fn delta_with_replacement(&self, data: &Observations, i: usize, value: f64) -> Result<f64> {
        self.delta(&data.with_replacement(i, value)?)
    }

    /// `Δ_i` under the requested construction.
    fn delta_variant(&self, data: &Observations, i: usize, mode: VariantMode, rng: &mut dyn RngCore) -> Result<f64> {
        let value = match mode {
            VariantMode::ZeroOut => 0.0,
            VariantMode::Resample => self.draw_copy(i, rng),
        };
        self.delta_with_replacement(data, i, value)
    }

    /// Full decomposition of `data`. Models override this with fast updates.
    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        let g = self.linear_terms(data)?;
        let t = self.statistic(data)?;
        let w: f64 = g.iter().sum();
        let delta = self.delta(data)?;
        let delta_i = match mode {
            None => Vec::new(),
            Some(m) => (0..g.len())
                .map(|i| self.delta_variant(data, i, m, rng))
                .collect::<Result<_>>()?,
        };
        Ok(DecompositionSample { t, w, delta, g, delta_i, index_weight: 1.0 })
    }

    /// Draw data and decompose it.
    fn sample_decomposition(&self, rng: &mut dyn RngCore, mode: Option<VariantMode>) -> Result<DecompositionSample> {
        let data = self.sample_data(rng);
        self.decompose(&data, mode, rng)
    }
}
