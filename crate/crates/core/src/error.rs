use thiserror::Error;

/// A failed metric-axiom check, carrying the witnessing indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("nonzero diagonal entry at ({0},{0})")]
    NonzeroDiagonal(usize),
    #[error("asymmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("negative distance at ({0},{1})")]
    Negative(usize, usize),
    #[error("zero distance between distinct points ({0},{1})")]
    ZeroOffDiagonal(usize, usize),
    #[error("triangle inequality violated: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    Triangle(usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("invalid ordinal expression `{text}`: {reason}")]
    Ordinal { text: String, reason: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("tuple lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("point index {index} out of range for carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("resource ceiling exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
