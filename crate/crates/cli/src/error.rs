use thiserror::Error;

/// Failures surfaced by the front end, each tied to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags, model files or preconditions; exit status 2.
    #[error("{0}")]
    Validation(String),

    /// Numeric or domain failure inside the computation; exit status 3.
    #[error("{0}")]
    Numeric(String),

    /// The bound sweep found violations; exit status 4.
    #[error("{0}")]
    BoundViolation(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::BoundViolation(_) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<discos_core::Error> for CliError {
    fn from(e: discos_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
