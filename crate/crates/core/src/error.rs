use thiserror::Error;

/// Errors raised by bound computations, models and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("degenerate statistic: {0}")]
    Degenerate(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("configuration error:\n{0}")]
    Config(crate::lab::config::ConfigErrors),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
