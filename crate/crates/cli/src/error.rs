use thiserror::Error;

/// CLI failure, mapped to the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config, input files, or a regime/method mismatch.
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A comparison or qualitative check did not hold.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
            Self::Verification(_) => 4,
        }
    }
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

impl From<ctrw_core::Error> for CliError {
    fn from(e: ctrw_core::Error) -> Self {
        use ctrw_core::Error as E;
        match e {
            E::Domain(_) | E::Regime(_) | E::Model(_) | E::Unsupported(_) => Self::Usage(e.to_string()),
            E::Singularity(_) | E::Numerical(_) | E::Coverage(_) | E::Discretization(_) => {
                Self::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}
