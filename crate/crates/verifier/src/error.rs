use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type VerifyResult<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("trust store: {0}")]
    Trust(String),

    #[error("page unreachable: {0}")]
    PageUnreachable(String),

    #[error("malformed chunk manifest: {0}")]
    MalformedManifest(String),

    #[error("sidecar has no chunk manifest")]
    NotChunked,

    #[error(
        "stream ended after {received} of {expected} bytes ({verdicts} chunk verdicts emitted)"
    )]
    StreamTruncated {
        received: u64,
        expected: u64,
        verdicts: usize,
    },

    #[error("stream continues past the {expected} bytes covered by the manifest")]
    TrailingData { expected: u64 },
}

impl VerifyError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        if source.kind() == io::ErrorKind::NotFound {
            VerifyError::FileNotFound(path.to_owned())
        } else {
            VerifyError::Io {
                path: path.to_owned(),
                source,
            }
        }
    }
}
