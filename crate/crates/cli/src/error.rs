use std::path::PathBuf;

use thiserror::Error;

use qcsm_core::ScenarioError;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: parse error: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: invalid scenario: {message}", path.display())]
    Validation { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {message}", path.display())]
    Output { path: PathBuf, message: String },
    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: ScenarioError,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn output(path: impl Into<PathBuf>, e: impl std::fmt::Display) -> Self {
        CliError::Output {
            path: path.into(),
            message: e.to_string(),
        }
    }
}
