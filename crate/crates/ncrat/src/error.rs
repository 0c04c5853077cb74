use thiserror::Error;

/// Errors raised across the library. Each variant names a distinct failure
/// that callers (notably the CLI) map to their own exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable x{index} out of range (d = {d})")]
    VariableIndex { index: usize, d: usize },
    #[error("centre is not in the domain of the expression")]
    CentreNotInDomain,
    #[error("point is not in the domain")]
    NotInDomain,
    #[error("realizations do not share the same centre")]
    CentreMismatch,
    #[error("realization is not minimal ({0})")]
    NotMinimal(String),
    #[error("state dimension {l} is not divisible by the centre size {s}")]
    Divisibility { l: usize, s: usize },
    #[error("block structure check failed: {0}")]
    BlockStructure(String),
    #[error("no common centre found within the sampling budget")]
    Inconclusive,
    #[error("function is not hermitian: {0}")]
    NotHermitian(String),
    #[error("parameter F is not definite")]
    NotDefinite,
    #[error("algebra error: {0}")]
    Algebra(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, NcError>;
