use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient precision: need {needed} digits, have {have}")]
    InsufficientPrecision { needed: u32, have: u32 },
    #[error("Newton criterion fails at the starting point")]
    CriterionFailed,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported place: {0}")]
    UnsupportedPlace(String),
    #[error("precision cap of {0} digits exceeded")]
    PrecisionCapExceeded(u32),
    #[error("conic search exhausted at effort {0}")]
    EffortExhausted(u32),
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("search exhausted after {0} candidates")]
    SearchExhausted(u64),
    #[error("surface has no stored factorization")]
    MissingFactorization,
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
