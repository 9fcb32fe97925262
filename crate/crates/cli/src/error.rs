use std::path::Path;

use chancal_core::abc::PmcFailure;
use chancal_core::ErrorKind;

/// Exit status for success.
pub const EXIT_OK: u8 = 0;
/// Exit status for I/O failures.
pub const EXIT_IO: u8 = 1;
/// Exit status for invalid input, configuration or parameters.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status for numerical or degeneracy failures.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] chancal_core::Error),
    #[error(transparent)]
    Calibration(Box<PmcFailure>),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { context: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        let kind = match self {
            CliError::Io { .. } => return EXIT_IO,
            CliError::Invalid(_) => return EXIT_VALIDATION,
            CliError::Core(e) => e.kind(),
            CliError::Calibration(f) => f.error.kind(),
        };
        match kind {
            ErrorKind::Validation => EXIT_VALIDATION,
            ErrorKind::Numerical => EXIT_NUMERICAL,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io { context: "csv".into(), source: io },
            other => CliError::Invalid(format!("malformed table: {other:?}")),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
