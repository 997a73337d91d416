use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("field too large for enumeration: p^(2k) = {0} exceeds 2^20")]
    FieldTooLarge(u64),
    #[error("element lives in the wrong field level")]
    LevelMismatch,
    #[error("group order {order} exceeds the enumeration budget {budget}; lazy iteration is not available for this operation, raise --budget or pick a smaller context")]
    BudgetExceeded { order: u64, budget: u64 },
    #[error("eigenvector separation failed: {0}")]
    EigenSeparation(String),
    #[error("representation is not generic")]
    NotGeneric,
    #[error("additive character is degenerate on a simple root slot")]
    DegenerateCharacter,
    #[error("multiplicity violation: {0}")]
    Multiplicity(String),
    #[error("verification mismatch: {0}")]
    Mismatch(String),
    #[error("no context available for {0}")]
    MissingContext(String),
    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
