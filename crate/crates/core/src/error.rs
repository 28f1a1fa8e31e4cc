use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integer overflow during {0}")]
    IntegerOverflow(&'static str),

    #[error("matrix is not skew-symmetrizable: {0}")]
    NotSkewSymmetrizable(String),

    /// Signals invalid input or an internal bug: exchange-relation
    /// divisions are always exact on legal seeds.
    #[error("non-exact division in the Laurent ring")]
    NonExactDivision,

    #[error("invalid automorphism: {0}")]
    InvalidAut(String),

    #[error("mode unavailable: {0}")]
    ModeUnavailable(String),

    #[error("reduction failed: {0}")]
    ReductionFailed(String),

    #[error("{what} not found within bound {bound}")]
    NotFound { what: String, bound: usize },

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("direction {k} out of range 1..={n}")]
    BadDirection { k: usize, n: usize },

    #[error("path is not reduced: label {label} repeats at position {position} (mutations are involutions)")]
    NonReducedPath { label: usize, position: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("objects belong to different cluster patterns")]
    PatternMismatch,

    #[error("C-matrix filter disagrees with the Laurent computation: {0}")]
    FilterDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
