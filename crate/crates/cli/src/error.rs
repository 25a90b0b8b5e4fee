use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("missing {what} file {}", path.display())]
    Missing { what: &'static str, path: PathBuf },
    #[error("{0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("certification failed: {0}")]
    Certification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Certification(_) => 2,
            CliError::Io { .. } | CliError::Json { .. } | CliError::Missing { .. } | CliError::Config(_) => 3,
        }
    }
}
