//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A prime was required but the given integer is not prime.
    #[error("{0} is not a prime")]
    NotPrime(u64),
    /// Zero has no square class.
    #[error("zero has no square class")]
    ZeroInput,
    /// Two values live over different fields or extensions.
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    /// A square class that should define a quadratic extension is trivial.
    #[error("{0} is a square, so it does not define a quadratic extension")]
    NotQuadraticExtension(String),
    /// An operation needs a form of positive rank.
    #[error("operation requires a form of positive rank")]
    RankZero,
    /// A text literal could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Structurally invalid input (bad group table, bad pair parameters, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An exhaustive search would exceed its budget.
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
