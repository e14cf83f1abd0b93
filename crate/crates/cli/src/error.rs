use std::path::PathBuf;

use a2a_core::ModelError;

/// Failures that map to exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("scenario parse error: {0}")]
    Parse(#[source] serde_json::Error),
    #[error("invalid scenario field `{field}`: {message}")]
    Scenario { field: String, message: String },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn scenario(field: &str, message: &str) -> Self {
        CliError::Scenario {
            field: field.to_owned(),
            message: message.to_owned(),
        }
    }
}
