use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("{what} needs {needed} but the configured bound is {bound}")]
    BoundExceeded {
        what: String,
        needed: u128,
        bound: u128,
    },
    #[error("unsupported presentation: {0}")]
    Unsupported(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("malformed ring: {0}")]
    MalformedRing(String),
    #[error("no abelian group of order {0} has the given element-order statistics")]
    NoMatchingGroup(u128),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// True for errors caused by a configured size limit rather than bad input.
    pub fn is_resource_bound(&self) -> bool {
        matches!(self, Error::BoundExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
