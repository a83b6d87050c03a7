use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("entry {0} is not p-integral")]
    NotIntegral(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{candidates} candidates exceed the enumeration budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed weight: {0}")]
    MalformedWeight(String),

    #[error("weight is not dominant: {0}")]
    NotDominant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
