use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("discretization error: {0}")]
    Discretization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
