use thiserror::Error;

/// Hyperplane and weight indices are 0-based in the API; messages print them 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("normal {} is zero", .index + 1)]
    ZeroNormal { index: usize },
    #[error("hyperplanes {} and {} coincide", .first + 1, .second + 1)]
    DuplicateHyperplane { first: usize, second: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
    #[error("arrangement is not essential and irreducible")]
    NotEssentialOrReducible,
    #[error("weight {} is not positive", .index + 1)]
    NonPositiveWeight { index: usize },
    #[error("expected {expected} weights, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian positive-definite")]
    NotPositiveDefinite,
    #[error("balance did not converge")]
    NotConverged,
    #[error("no strictly feasible weights")]
    NotFeasible,
    #[error("LP solver failed: {0}")]
    LpNumericalFailure(String),
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
