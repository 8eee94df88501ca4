use std::process::ExitCode;

use obliq_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Internal(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Degenerate(_) => ExitCode::from(3),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidConfig { .. }
            | CoreError::InvalidKappa(_)
            | CoreError::InvalidLambda(_) => CliError::Input(err.to_string()),
            CoreError::DegenerateSample(_)
            | CoreError::DegenerateStats(_)
            | CoreError::HorizontalUndefined
            | CoreError::SignAmbiguous
            | CoreError::RhoZero => CliError::Degenerate(err.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Internal(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
