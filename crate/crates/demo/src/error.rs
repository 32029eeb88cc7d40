use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type DemoResult<T> = std::result::Result<T, DemoError>;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure {
        addr: SocketAddr,
        #[source]
        source: io::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("invalid tamper entry '{0}': only media files under the root can be tampered")]
    InvalidTamper(String),

    #[error("TLS setup: {0}")]
    Tls(String),

    #[error(transparent)]
    Sign(#[from] newscert_signer::SignError),

    #[error(transparent)]
    Core(#[from] newscert_core::Error),

    #[error("image encoding: {0}")]
    Image(String),
}

impl DemoError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        DemoError::Io {
            path: path.to_owned(),
            source,
        }
    }
}
