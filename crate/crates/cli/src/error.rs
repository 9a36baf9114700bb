use thiserror::Error;

use pnml_core::PnmlError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    /// Process exit code: 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<PnmlError> for CliError {
    fn from(err: PnmlError) -> Self {
        match err {
            PnmlError::InvalidConfig(msg) => CliError::Config(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
