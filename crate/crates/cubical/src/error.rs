use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("flavor error: {0}")]
    Flavor(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("cap {cap} exceeded at dimension {dim}")]
    Cap { dim: usize, cap: usize },
    #[error("no lift: {0}")]
    Lift(String),
    #[error("synthesis failed: {0}")]
    Synthesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(format!($($arg)*)))
    };
}
pub(crate) use bail;
