use thiserror::Error;
use wigner_flow::error::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Core(e) => match e.root() {
                CoreError::InvalidArgument(_)
                | CoreError::OutsideBoundWindow { .. }
                | CoreError::Parse { .. }
                | CoreError::Io(_) => 2,
                _ => 3,
            },
            CliError::Numeric(_) => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
