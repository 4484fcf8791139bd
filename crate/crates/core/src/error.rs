use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to render a one-line
/// diagnostic; none of them are recoverable mid-computation.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("universes differ: {0}")]
    UniverseMismatch(String),

    #[error("universe is empty")]
    EmptyUniverse,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid cdf: {0}")]
    InvalidCdf(String),

    #[error("discretization grid too large: {cells} cells exceeds {max}")]
    GridOverflow { cells: u64, max: u64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("shape mismatch: {0}")]
    ShapeError(String),

    #[error("event stream exhausted after {consumed} events")]
    ExhaustedStream { consumed: u64 },

    #[error("assignment invalid at subset {{{subset}}}: {reason}")]
    InvalidAssignment { subset: String, reason: String },

    #[error("LP solver stalled after {iterations} pivots")]
    SolverStall { iterations: usize },

    #[error("unknown name: {0}")]
    NameError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
