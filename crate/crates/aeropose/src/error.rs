use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("no consensus: best hypothesis has {inliers} inliers, minimum is {min_inliers}")]
    NoConsensus { inliers: usize, min_inliers: usize },

    #[error("box corners are not in canonical order")]
    NonCanonicalBox,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("value {value} outside supported range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("input file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("failed to parse {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    /// Process exit code for the CLI: 2 config, 3 input, 4 runtime.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::MissingFile(_) | Error::Parse { .. } | Error::Io(_) | Error::EmptyInput(_) => 3,
            _ => 4,
        }
    }
}
