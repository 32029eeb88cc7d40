use std::io;
use std::path::{Path, PathBuf};

use newscert_core::Error as CoreError;
use thiserror::Error;

pub type SignResult<T> = std::result::Result<T, SignError>;

#[derive(Debug, Error)]
pub enum SignError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),

    #[error("cannot chunk-sign an empty asset")]
    EmptyMedia,

    #[error("chunk size {0} is below the {min} byte minimum", min = crate::sign::MIN_CHUNK_SIZE)]
    ChunkSizeTooSmall(u64),

    #[error("unparsable HTML: {0}")]
    UnparsableHtml(String),

    #[error(transparent)]
    Core(CoreError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl SignError {
    /// Maps an I/O error on `path`, turning not-found into [`SignError::FileNotFound`].
    pub fn io(path: &Path, source: io::Error) -> Self {
        if source.kind() == io::ErrorKind::NotFound {
            SignError::FileNotFound(path.to_owned())
        } else {
            SignError::Io {
                path: path.to_owned(),
                source,
            }
        }
    }
}

impl From<CoreError> for SignError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidKey(m) => SignError::InvalidKey(m),
            CoreError::MalformedCertificate(m) => SignError::MalformedCertificate(m),
            CoreError::InvalidMetadata(m) => SignError::InvalidMetadata(m),
            CoreError::EmptyMedia => SignError::EmptyMedia,
            CoreError::InvalidChunkSize(n) => SignError::ChunkSizeTooSmall(n),
            other => SignError::Core(other),
        }
    }
}
