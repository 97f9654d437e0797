use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension {0} is not prime")]
    NotPrime(usize),
    #[error("invalid state or operator: {0}")]
    Invalid(String),
    #[error("dense cap exceeded: {what} needs dimension {dim}, cap is {cap}")]
    CapExceeded { what: String, dim: u128, cap: u128 },
    #[error("not a Clifford operation: {0}")]
    NotClifford(String),
    #[error("malformed matching: {0}")]
    MalformedMatching(String),
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("qudit dimension {d} too small for {n} shares")]
    DimensionTooSmall { d: usize, n: usize },
    #[error("need {k} shares to decode, got {got}")]
    InsufficientShares { k: usize, got: usize },
    #[error("neither side holds enough shares")]
    AmbiguousSide,
    #[error("protocol is not one-sided: {0}")]
    NotOneSided(String),
    #[error("register ownership violated: {0}")]
    Ownership(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::IndexOutOfRange(msg.into())
    }
}
