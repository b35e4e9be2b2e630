use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}:{line}: {message}")]
    ScenarioSyntax {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("model spec {spec:?}: {message}")]
    ModelSpec { spec: String, message: String },
    #[error("config {path}: {source}")]
    Config {
        path: String,
        source: serde_json::Error,
    },
    #[error("reading {path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("writing {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Validation(#[from] cocked_hat::Error),
}

impl CliError {
    /// 2 for malformed input, 1 for everything that fails after parsing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::ScenarioSyntax { .. }
            | CliError::ModelSpec { .. }
            | CliError::Config { .. }
            | CliError::Read { .. } => 2,
            CliError::Write { .. } | CliError::Csv(_) | CliError::Validation(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
