//! Signing single assets into sidecar files.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use newscert_core::{
    check_key_matches, decode_certificates, digest_reader, load_private_key, serialize_sidecar,
    sidecar_path_for, ChunkSigner, EndorsementMetadata, RsaPrivateKey, SidecarDocument,
    DEFAULT_CHUNK_SIZE,
};
use tempfile::NamedTempFile;

use crate::error::{SignError, SignResult};

/// Smallest accepted chunk size (64 KiB).
pub const MIN_CHUNK_SIZE: u64 = 64 * 1024;

const READ_BLOCK: usize = 64 * 1024;

#[derive(Debug, Clone)]
pub struct SignRequest {
    pub asset_path: PathBuf,
    pub metadata: EndorsementMetadata,
    pub key_path: PathBuf,
    /// PEM file whose first certificate is the endorser's.
    pub cert_chain_path: PathBuf,
    /// Defaults to the asset path with `.xmp` appended.
    pub output_path: Option<PathBuf>,
    pub chunk_size: Option<u64>,
}

impl SignRequest {
    pub fn new(
        asset_path: impl Into<PathBuf>,
        metadata: EndorsementMetadata,
        key_path: impl Into<PathBuf>,
        cert_chain_path: impl Into<PathBuf>,
    ) -> Self {
        SignRequest {
            asset_path: asset_path.into(),
            metadata,
            key_path: key_path.into(),
            cert_chain_path: cert_chain_path.into(),
            output_path: None,
            chunk_size: None,
        }
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| sidecar_path_for(&self.asset_path))
    }
}

/// Endorser key plus the certificate that certifies it.
#[derive(Clone)]
pub struct Credentials {
    key: RsaPrivateKey,
    certificate_der: Vec<u8>,
}

impl std::fmt::Debug for Credentials {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Credentials")
            .field("certificate_der", &self.certificate_der.len())
            .finish_non_exhaustive()
    }
}

impl Credentials {
    pub fn load(key_path: &Path, cert_chain_path: &Path) -> SignResult<Self> {
        let key_bytes = std::fs::read(key_path).map_err(|e| SignError::io(key_path, e))?;
        let cert_bytes =
            std::fs::read(cert_chain_path).map_err(|e| SignError::io(cert_chain_path, e))?;
        let key = load_private_key(&key_bytes)?;
        let certificate_der = decode_certificates(&cert_bytes)?
            .into_iter()
            .next()
            .ok_or_else(|| SignError::MalformedCertificate("no certificate found".into()))?;
        Self::new(key, certificate_der)
    }

    /// Fails unless `key` belongs to the certificate.
    pub fn new(key: RsaPrivateKey, certificate_der: Vec<u8>) -> SignResult<Self> {
        check_key_matches(&key, &certificate_der)?;
        Ok(Credentials {
            key,
            certificate_der,
        })
    }

    pub fn key(&self) -> &RsaPrivateKey {
        &self.key
    }

    pub fn certificate_der(&self) -> &[u8] {
        &self.certificate_der
    }
}

/// Signs the asset and writes its sidecar. Dispatches to [`sign_chunked`]
/// when the request carries a chunk size. Returns the sidecar path.
pub fn sign_asset(req: &SignRequest) -> SignResult<PathBuf> {
    let creds = Credentials::load(&req.key_path, &req.cert_chain_path)?;
    sign_with(req, &creds)
}

/// Chunk-signs the asset, using the default chunk size if none was given.
pub fn sign_chunked(req: &SignRequest) -> SignResult<PathBuf> {
    let creds = Credentials::load(&req.key_path, &req.cert_chain_path)?;
    let mut req = req.clone();
    req.chunk_size.get_or_insert(DEFAULT_CHUNK_SIZE);
    sign_with(&req, &creds)
}

/// [`sign_asset`] with already loaded credentials; key and certificate paths
/// in the request are ignored.
pub fn sign_with(req: &SignRequest, creds: &Credentials) -> SignResult<PathBuf> {
    let doc = match req.chunk_size {
        Some(size) => endorse_chunked_file(&req.asset_path, &req.metadata, size, creds)?,
        None => endorse_file(&req.asset_path, &req.metadata, creds)?,
    };
    let out = req.sidecar_path();
    write_atomic(&out, serialize_sidecar(&doc).as_bytes())?;
    Ok(out)
}

fn endorse_file(
    path: &Path,
    meta: &EndorsementMetadata,
    creds: &Credentials,
) -> SignResult<SidecarDocument> {
    meta.check_signable()?;
    let file = File::open(path).map_err(|e| SignError::io(path, e))?;
    let (digest, _) = digest_reader(meta, file).map_err(|e| SignError::io(path, e))?;
    Ok(SidecarDocument::endorse_digest(
        meta,
        &digest,
        &creds.key,
        &creds.certificate_der,
    )?)
}

fn endorse_chunked_file(
    path: &Path,
    meta: &EndorsementMetadata,
    chunk_size: u64,
    creds: &Credentials,
) -> SignResult<SidecarDocument> {
    if chunk_size < MIN_CHUNK_SIZE {
        return Err(SignError::ChunkSizeTooSmall(chunk_size));
    }
    let mut file = File::open(path).map_err(|e| SignError::io(path, e))?;
    let mut signer = ChunkSigner::new(meta, chunk_size, &creds.key)?;
    let mut buf = vec![0u8; READ_BLOCK];
    loop {
        let n = match file.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(SignError::io(path, e)),
        };
        signer.update(&buf[..n])?;
    }
    Ok(signer.finish()?.into_sidecar(meta, &creds.certificate_der))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> SignResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| SignError::io(dir, e))?;
    tmp.write_all(bytes)
        .map_err(|e| SignError::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| SignError::io(tmp.path(), e))?;
    tmp.persist(path)
        .map_err(|e| SignError::io(path, e.error))?;
    Ok(())
}
