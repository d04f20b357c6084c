use thiserror::Error;

/// Errors raised by the numerical kernel and the geometry layers built on it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("non-finite jet coefficient at multi-index {multi_index:?}")]
    NonFinite { multi_index: Vec<usize> },

    #[error("series did not converge within {terms} terms (last term norm {last_norm:e})")]
    Divergence { terms: usize, last_norm: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fundamental tensor is not positive definite at y = {y:?}")]
    Inadmissible { y: Vec<f64> },

    #[error("phi(s) - s phi'(s) vanishes at s = {s}")]
    Singularity { s: f64 },

    #[error("positivity criterion fails at s = {s} (value {value:e})")]
    Positivity { s: f64, value: f64 },

    #[error("algebra {family} is not realized numerically: {reason}")]
    NotRealized { family: String, reason: String },

    #[error("invariance violated: {0}")]
    Invariance(String),

    #[error("structural check failed: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("chart radius exceeded: |x| = {norm} > {radius}")]
    ChartRadius { norm: f64, radius: f64 },

    #[error("degenerate flag: transverse edge is parallel to the flagpole")]
    DegenerateFlag,

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
