use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller violated a precondition (bad weight, wrong ring, malformed input).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("weight {weight} exceeds the truncation weight {max_weight}")]
    Truncation { weight: usize, max_weight: usize },

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("group variant mismatch: {0}")]
    VariantMismatch(String),

    /// The leading homogeneous component of a Magnus element is not a Lie element.
    #[error("component of degree {degree} is not a Lie element")]
    NonLie { degree: usize },

    #[error("no integral solution of [alpha,a] + [beta,b] = t in weight {weight}")]
    Unsolvable { weight: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
