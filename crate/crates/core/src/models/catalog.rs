//! Name-addressed construction of the built-in models.

use super::example41::{Example41Model, Example41Spec};
use super::linear::LinearSumModel;
use super::lstat::{LStatModel, LStatSpec, Weight};
use super::multisample::{MultiKernel, MultiUStatModel, MultiUStatSpec};
use super::ustat::{Kernel, UStatModel, UStatSpec};
use super::{DecompositionSample, Observations, StatisticModel, VariantMode};
use crate::bound_core::LinearPart;
use crate::dist::Distribution;
use crate::error::{Error, Result};
use rand::RngCore;
use serde::Serialize;

/// Plain-data description of a catalog model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDescriptor {
    Linear { distribution: Distribution, n: usize },
    Ustat { kernel: String, distribution: Distribution, n: usize },
    Multisample { kernel: String, distribution: Distribution, sizes: Vec<usize> },
    Lstat { weight: String, distribution: Distribution, n: usize },
    Example41 { epsilon: f64, n: Option<f64> },
}

impl ModelDescriptor {
    pub const KINDS: [&'static str; 5] = ["linear", "ustat", "multisample", "lstat", "example41"];

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::Ustat { .. } => "ustat",
            Self::Multisample { .. } => "multisample",
            Self::Lstat { .. } => "lstat",
            Self::Example41 { .. } => "example41",
        }
    }

    /// Sample size `n` (total over groups), where defined.
    pub fn n(&self) -> Option<f64> {
        match self {
            Self::Linear { n, .. } | Self::Ustat { n, .. } | Self::Lstat { n, .. } => Some(*n as f64),
            Self::Multisample { sizes, .. } => Some(sizes.iter().sum::<usize>() as f64),
            Self::Example41 { epsilon, n } => Some(n.unwrap_or_else(|| epsilon.powi(-4).round().max(2.0))),
        }
    }

    /// Copy with the size replaced; multisample groups are all set to `n`.
    pub fn with_n(&self, value: usize) -> Self {
        let mut d = self.clone();
        match &mut d {
            Self::Linear { n, .. } | Self::Ustat { n, .. } | Self::Lstat { n, .. } => *n = value,
            Self::Multisample { sizes, .. } => sizes.iter_mut().for_each(|s| *s = value),
            Self::Example41 { n, .. } => *n = Some(value as f64),
        }
        d
    }

    pub fn with_epsilon(&self, value: f64) -> Result<Self> {
        match self {
            Self::Example41 { n, .. } => Ok(Self::Example41 { epsilon: value, n: *n }),
            _ => Err(Error::InvalidModel("epsilon applies to example41 models only".into())),
        }
    }

    pub fn build(&self) -> Result<CatalogModel> {
        Ok(match self {
            Self::Linear { distribution, n } => CatalogModel::Linear(LinearSumModel::new(*distribution, *n)?),
            Self::Ustat { kernel, distribution, n } => {
                let k = Kernel::from_name(kernel).ok_or_else(|| unknown("kernel", kernel, &Kernel::CATALOG))?;
                CatalogModel::UStat(UStatModel::new(UStatSpec::new(k, *distribution, *n)?)?)
            }
            Self::Multisample { kernel, distribution, sizes } => {
                let k = MultiKernel::from_name(kernel).ok_or_else(|| unknown("kernel", kernel, &MultiKernel::CATALOG))?;
                let spec = MultiUStatSpec::new(k, vec![*distribution; sizes.len()], sizes.clone())?;
                CatalogModel::Multi(MultiUStatModel::new(spec)?)
            }
            Self::Lstat { weight, distribution, n } => {
                let w = Weight::from_name(weight).ok_or_else(|| unknown("weight", weight, &Weight::CATALOG))?;
                CatalogModel::LStat(LStatModel::new(LStatSpec::new(w, *distribution, *n)?)?)
            }
            Self::Example41 { epsilon, n } => {
                let spec = match n {
                    Some(n) => Example41Spec::new(*epsilon, *n)?,
                    None => Example41Spec::coupled(*epsilon)?,
                };
                CatalogModel::Example41(Example41Model::new(spec))
            }
        })
    }
}

fn unknown(what: &str, name: &str, catalog: &[&str]) -> Error {
    Error::UnsupportedModel(format!("unknown {what} \"{name}\"; available: {}", catalog.join(", ")))
}

/// A built catalog model.
#[derive(Debug, Clone)]
pub enum CatalogModel {
    Linear(LinearSumModel),
    UStat(UStatModel),
    Multi(MultiUStatModel),
    LStat(LStatModel),
    Example41(Example41Model),
}

impl CatalogModel {
    fn inner(&self) -> &dyn StatisticModel {
        match self {
            Self::Linear(m) => m,
            Self::UStat(m) => m,
            Self::Multi(m) => m,
            Self::LStat(m) => m,
            Self::Example41(m) => m,
        }
    }
}

impl StatisticModel for CatalogModel {
    fn id(&self) -> String {
        self.inner().id()
    }
    fn size(&self) -> u64 {
        self.inner().size()
    }
    fn arity(&self) -> Option<u64> {
        self.inner().arity()
    }
    fn sample_data(&self, rng: &mut dyn RngCore) -> Observations {
        self.inner().sample_data(rng)
    }
    fn statistic(&self, data: &Observations) -> Result<f64> {
        self.inner().statistic(data)
    }
    fn linear_terms(&self, data: &Observations) -> Result<Vec<f64>> {
        self.inner().linear_terms(data)
    }
    fn draw_copy(&self, i: usize, rng: &mut dyn RngCore) -> f64 {
        self.inner().draw_copy(i, rng)
    }
    fn linear_part(&self) -> Result<LinearPart> {
        self.inner().linear_part()
    }
    fn delta(&self, data: &Observations) -> Result<f64> {
        self.inner().delta(data)
    }
    fn decompose(&self, data: &Observations, mode: Option<VariantMode>, rng: &mut dyn RngCore) -> Result<DecompositionSample> {
        self.inner().decompose(data, mode, rng)
    }
}
