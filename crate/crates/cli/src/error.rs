use legendre_core::Error as CoreError;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Failure(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Failure(_) => 1,
            Self::Config(_) | Self::Io(_) | Self::Csv(_) => 2,
            Self::NonConvergence(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence { .. } | CoreError::SingularHessian => {
                Self::NonConvergence(e.to_string())
            }
            CoreError::NotElliptic { .. }
            | CoreError::GrowthViolation { .. }
            | CoreError::PreconditionViolation { .. }
            | CoreError::NegativeComponent { .. }
            | CoreError::NotConvex { .. } => Self::Failure(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}
