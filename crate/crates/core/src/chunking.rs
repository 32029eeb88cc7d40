//! Incremental signing of fixed-size chunks.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use rsa::RsaPrivateKey;

use crate::error::{Error, Result};
use crate::message::{Digest, PreimageHasher};
use crate::metadata::EndorsementMetadata;
use crate::sidecar::{check_key_matches, ChunkEntry, SidecarDocument};
use crate::signature::{sign_digest, SignatureValue};

/// Default nominal chunk size (1 MiB).
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 20;

/// Splits an arbitrarily delivered byte stream into `chunk_size` pieces and
/// signs each one as it completes. Also digests the whole asset so the
/// resulting sidecar verifies both per chunk and as a single file.
pub struct ChunkSigner<'k> {
    metadata: EndorsementMetadata,
    chunk_size: u64,
    key: &'k RsaPrivateKey,
    whole: PreimageHasher,
    current: PreimageHasher,
    current_len: u64,
    offset: u64,
    entries: Vec<ChunkEntry>,
}

/// Output of [`ChunkSigner::finish`].
#[derive(Debug, Clone)]
pub struct ChunkedEndorsement {
    pub digest: Digest,
    pub signature: SignatureValue,
    pub chunks: Vec<ChunkEntry>,
    pub total_len: u64,
}

impl<'k> ChunkSigner<'k> {
    pub fn new(
        metadata: &EndorsementMetadata,
        chunk_size: u64,
        key: &'k RsaPrivateKey,
    ) -> Result<Self> {
        if chunk_size == 0 {
            return Err(Error::InvalidChunkSize(0));
        }
        metadata.check_signable()?;
        Ok(ChunkSigner {
            whole: PreimageHasher::new(metadata, None),
            current: PreimageHasher::new(metadata, Some(0)),
            metadata: metadata.clone(),
            chunk_size,
            key,
            current_len: 0,
            offset: 0,
            entries: Vec::new(),
        })
    }

    pub fn update(&mut self, mut data: &[u8]) -> Result<()> {
        self.whole.update(data);
        while !data.is_empty() {
            let room = (self.chunk_size - self.current_len) as usize;
            let take = room.min(data.len());
            self.current.update(&data[..take]);
            self.current_len += take as u64;
            data = &data[take..];
            if self.current_len == self.chunk_size {
                self.close_chunk()?;
            }
        }
        Ok(())
    }

    fn close_chunk(&mut self) -> Result<()> {
        let index = self.entries.len() as u64;
        let next = PreimageHasher::new(&self.metadata, Some(index + 1));
        let digest = std::mem::replace(&mut self.current, next).finalize();
        let signature = sign_digest(&digest, self.key)?;
        self.entries.push(ChunkEntry {
            index,
            byte_offset: self.offset,
            byte_length: self.current_len,
            digest_hex: digest.to_hex(),
            signature_b64: signature.to_b64(),
        });
        self.offset += self.current_len;
        self.current_len = 0;
        Ok(())
    }

    /// Chunks completed so far.
    pub fn chunks(&self) -> &[ChunkEntry] {
        &self.entries
    }

    pub fn finish(mut self) -> Result<ChunkedEndorsement> {
        if self.current_len > 0 {
            self.close_chunk()?;
        }
        if self.entries.is_empty() {
            return Err(Error::EmptyMedia);
        }
        let digest = self.whole.finalize();
        let signature = sign_digest(&digest, self.key)?;
        Ok(ChunkedEndorsement {
            digest,
            signature,
            total_len: self.offset,
            chunks: self.entries,
        })
    }
}

impl ChunkedEndorsement {
    pub fn into_sidecar(
        self,
        metadata: &EndorsementMetadata,
        certificate_der: &[u8],
    ) -> SidecarDocument {
        SidecarDocument {
            metadata: metadata.clone(),
            digest_hex: self.digest.to_hex(),
            signature_b64: self.signature.to_b64(),
            certificate_b64: STANDARD.encode(certificate_der),
            chunks: Some(self.chunks),
        }
    }
}

impl SidecarDocument {
    /// Chunk-signs in-memory media.
    pub fn endorse_chunked(
        meta: &EndorsementMetadata,
        media: &[u8],
        chunk_size: u64,
        key: &RsaPrivateKey,
        certificate_der: &[u8],
    ) -> Result<Self> {
        check_key_matches(key, certificate_der)?;
        let mut signer = ChunkSigner::new(meta, chunk_size, key)?;
        signer.update(media)?;
        Ok(signer.finish()?.into_sidecar(meta, certificate_der))
    }
}
