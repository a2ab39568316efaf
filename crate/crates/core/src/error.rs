//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrError {
    #[error("invalid linear form: all coefficients are zero")]
    InvalidForm,
    #[error("hyperplane {0} is not a member of the arrangement")]
    NotMember(String),
    #[error("hyperplane {0} is already a member of the arrangement")]
    AlreadyMember(String),
    #[error("subspace is not a flat of the arrangement")]
    NotAFlat,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation requires a nonempty arrangement")]
    EmptyArrangement,
    #[error("index {index} out of range 0..={max}")]
    IndexError { index: usize, max: usize },
    #[error("rank error: {0}")]
    RankError(String),
    #[error("derivation is not logarithmic along {0}")]
    NotLogarithmic(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid section: {0}")]
    BadSection(String),
    #[error("path step {index} failed: {reason}")]
    PathInvalid { index: usize, reason: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown pivot: {0}")]
    UnknownPivot(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ArrError>;
