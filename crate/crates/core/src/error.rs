use thiserror::Error;

/// Errors raised by the library at API boundaries.
///
/// Inside the sampler, numerical failures of a proposal are not errors: they
/// map to a `-inf` log-likelihood and the proposal is rejected.
#[derive(Debug, Error)]
pub enum RgmError {
    #[error("dimension mismatch in {block}: expected {expected}, found {found}")]
    Dimension {
        block: String,
        expected: String,
        found: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

impl RgmError {
    pub(crate) fn dimension(block: impl Into<String>, expected: (usize, usize), found: (usize, usize)) -> Self {
        RgmError::Dimension {
            block: block.into(),
            expected: format!("{}x{}", expected.0, expected.1),
            found: format!("{}x{}", found.0, found.1),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        RgmError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn format(path: &std::path::Path, reason: impl Into<String>) -> Self {
        RgmError::Format {
            path: path.display().to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, RgmError>;
