use pmk_core::ErrorClass;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {message}")]
    InvalidSpec { field: &'static str, message: String },
    #[error("{0}")]
    Core(#[from] pmk_core::Error),
    #[error("{0} does not fit in a 64-bit JSON integer")]
    TooLarge(String),
    #[error("{0} oracle check(s) failed")]
    OracleFailed(usize),
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 1 usage or parse, 2 precondition, 3 resource, 4 inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } | CliError::Json(_) => 1,
            CliError::InvalidSpec { .. } => 1,
            CliError::Core(pmk_core::Error::InvalidLift(_)) => 1,
            CliError::Core(e) => match e.class() {
                ErrorClass::Precondition => 2,
                ErrorClass::ResourceLimit => 3,
                ErrorClass::Inconsistency => 4,
            },
            CliError::TooLarge(_) => 3,
            CliError::OracleFailed(_) => 4,
        }
    }
}
