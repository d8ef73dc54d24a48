use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unsupported image payload.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("unsupported image: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        found: (u32, u32),
    },

    #[error("permutation length {key} does not match {pixels} pixels")]
    LengthMismatch { key: usize, pixels: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Fewer than `n` shares were presented for reconstruction.
    #[error("missing share: {found} of {expected} shares present")]
    MissingShare { expected: usize, found: usize },

    #[error("digest mismatch for share {file}")]
    DigestMismatch { file: String },

    /// Correlation is undefined when either image has zero variance.
    #[error("correlation undefined: image has zero variance")]
    ZeroVariance,

    #[error("empty corpus under {0}")]
    EmptyCorpus(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 usage, 3 I/O, 4 integrity,
    /// 5 dimension/format.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) => 2,
            Error::Io { .. } | Error::Json { .. } | Error::EmptyCorpus(_) => 3,
            Error::MissingShare { .. } | Error::DigestMismatch { .. } => 4,
            Error::Format { .. }
            | Error::Unsupported(_)
            | Error::DimensionMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::ZeroVariance => 5,
        }
    }
}
