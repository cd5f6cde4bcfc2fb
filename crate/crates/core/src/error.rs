use crate::exactmath::MathError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("bound vector d{index} has non-positive entry {entry} at position {position}")]
    NonPositiveBound { index: usize, position: usize, entry: String },
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("precondition violated: {0}")]
    Contract(String),
    #[error("invalid diagonal matrices: {0}")]
    InvalidDiagonal(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid epsilon grid: {0}")]
    InvalidGrid(String),
    #[error("degree undefined: the tuple does not have the R0-W property")]
    NotR0W,
    #[error("no generic target found after {0} draws")]
    GenericityExhausted(usize),
    #[error("generator budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
