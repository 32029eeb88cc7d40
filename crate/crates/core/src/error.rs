use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("malformed sidecar: {0}")]
    MalformedSidecar(String),

    #[error("invalid digest: {0}")]
    InvalidDigest(String),

    #[error("invalid signature encoding: {0}")]
    InvalidSignatureEncoding(String),

    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),

    #[error("chunked signing requires non-empty media")]
    EmptyMedia,

    #[error("invalid chunk size {0}")]
    InvalidChunkSize(u64),

    #[error("certificate issuance failed: {0}")]
    Issuance(String),
}

impl Error {
    pub(crate) fn sidecar(msg: impl Into<String>) -> Self {
        Error::MalformedSidecar(msg.into())
    }
}
