use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdmError {
    #[error("x = {x} lies outside the domain ({lo}, {hi})")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid mass profile: {0}")]
    InvalidProfile(String),

    #[error("u = {u} lies outside the image ({lo}, {hi}) of the auxiliary function")]
    Range { u: f64, lo: f64, hi: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polynomial degree {n} exceeds the supported maximum {max}")]
    Precision { n: usize, max: usize },

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("level n = {n} is not a bound level (highest bound level: {max:?})")]
    Level { n: usize, max: Option<usize> },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid placement: {0}")]
    GridPlacement(String),

    #[error("extraction spread {spread:e} exceeds {limit:e}: the operator difference is not multiplicative")]
    InconsistentExtraction { spread: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, PdmError>;
