use std::path::Path;

use rgm::RgmError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] RgmError),

    #[error("malformed JSON in {path}: {reason}")]
    Json { path: String, reason: String },
}

impl CliError {
    pub fn json(path: &Path, e: serde_json::Error) -> Self {
        CliError::Json {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(RgmError::InvalidConfig(_) | RgmError::InvalidParameter(_)) => 2,
            CliError::Model(RgmError::Numerical(_)) => 4,
            CliError::Model(_) | CliError::Json { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage",
            4 => "numerical",
            _ => "data",
        }
    }

    /// One-line JSON document for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: u8,
            message: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Doc {
            error: Body {
                kind: self.kind(),
                exit_code: self.exit_code(),
                message: self.to_string(),
            },
        })
        .expect("error document serializes")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
