use thiserror::Error;

/// Errors produced by game construction, evaluation, parsing and solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("payoff matrix is empty")]
    Empty,

    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite payoff {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error(
        "game is not constant-sum: cell ({}, {}) sums to {} but cell ({}, {}) sums to {}",
        first.0, first.1, first.2, second.0, second.1, second.2
    )]
    NotConstantSum {
        first: (usize, usize, f64),
        second: (usize, usize, f64),
    },

    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("simplex exceeded the iteration limit of {limit} pivots")]
    IterationLimit { limit: usize },

    #[error("iteration count must be at least 1")]
    ZeroIterations,

    #[error("unknown algorithm `{0}` (valid: rm, rmplus, mw)")]
    UnknownAlgorithm(String),

    #[error("unknown averaging mode `{0}` (valid: expected, sampled)")]
    UnknownAveraging(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
