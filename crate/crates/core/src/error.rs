use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix normalizes to zero: Barvinok rank at most one, no point of the rank-two space")]
    ZeroClass,

    #[error("Barvinok rank exceeds two")]
    Rank,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a strict chain: {0}")]
    NotAChain(String),

    #[error("resource cap exceeded: {estimated} simplices estimated, cap is {cap}")]
    Resource { estimated: u128, cap: u128 },

    #[error("not a chain complex: {0}")]
    NotAComplex(String),

    #[error("structured relations violated: {0}")]
    Relation(String),

    #[error("matching map is not unimodular in degree {degree}")]
    NotInvertible { degree: usize },

    #[error("invalid characteristic {0}")]
    InvalidCharacteristic(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
