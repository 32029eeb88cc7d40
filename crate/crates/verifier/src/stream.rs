//! Verifying a chunked asset while it arrives.
//!
//! Media bytes are hashed as they are fed and never retained, so memory use is
//! bounded by the caller's read block regardless of asset or chunk size.

use std::collections::VecDeque;
use std::io::{self, Read};

use newscert_core::{
    establish_endorser, verify_chunk_digest, ChunkEntry, ChunkVerdict, EndorsementMetadata,
    PreimageHasher, SidecarDocument, TrustStore, TrustedEndorser, VerificationStatus,
};

use crate::error::{VerifyError, VerifyResult};

const DEFAULT_BLOCK: usize = 64 * 1024;

/// Push-style verifier: feed bytes in order, receive one verdict per chunk as
/// soon as the chunk's last byte has been fed.
pub struct ChunkStreamVerifier {
    metadata: EndorsementMetadata,
    entries: Vec<ChunkEntry>,
    endorser: Result<TrustedEndorser, (VerificationStatus, String)>,
    current: usize,
    hasher: Option<PreimageHasher>,
    filled: u64,
    received: u64,
    expected: u64,
}

impl ChunkStreamVerifier {
    /// Fails with [`VerifyError::NotChunked`] if the sidecar has no manifest.
    /// Endorser trust is settled once here; if it fails, every verdict carries
    /// that failure.
    pub fn new(manifest: &SidecarDocument, trust: &TrustStore) -> VerifyResult<Self> {
        let mut doc = manifest.clone();
        doc.validate()
            .map_err(|e| VerifyError::MalformedManifest(e.to_string()))?;
        let entries = match doc.chunks {
            Some(chunks) if !chunks.is_empty() => chunks,
            _ => return Err(VerifyError::NotChunked),
        };
        let expected = entries.iter().map(|c| c.byte_length).sum();
        Ok(ChunkStreamVerifier {
            endorser: establish_endorser(manifest, trust),
            hasher: Some(PreimageHasher::new(&doc.metadata, Some(0))),
            metadata: doc.metadata,
            entries,
            current: 0,
            filled: 0,
            received: 0,
            expected,
        })
    }

    /// Hashes `data` and calls `emit` for every chunk completed by it. Bytes
    /// beyond the manifest's total length are an error, reported after the
    /// verdicts for the bytes before them.
    pub fn feed(
        &mut self,
        mut data: &[u8],
        mut emit: impl FnMut(ChunkVerdict),
    ) -> VerifyResult<()> {
        while !data.is_empty() {
            let Some(entry) = self.entries.get(self.current) else {
                return Err(VerifyError::TrailingData {
                    expected: self.expected,
                });
            };
            let want = (entry.byte_length - self.filled).min(data.len() as u64) as usize;
            let hasher = self
                .hasher
                .as_mut()
                .expect("hasher present while chunks remain");
            hasher.update(&data[..want]);
            self.filled += want as u64;
            self.received += want as u64;
            data = &data[want..];

            if self.filled == entry.byte_length {
                let next = self.current + 1;
                let fresh = (next < self.entries.len())
                    .then(|| PreimageHasher::new(&self.metadata, Some(next as u64)));
                let digest = std::mem::replace(&mut self.hasher, fresh)
                    .expect("hasher present while chunks remain")
                    .finalize();
                emit(verify_chunk_digest(entry, &digest, &self.endorser));
                self.current = next;
                self.filled = 0;
            }
        }
        Ok(())
    }

    /// Convenience form of [`ChunkStreamVerifier::feed`] collecting verdicts.
    pub fn feed_collect(&mut self, data: &[u8]) -> VerifyResult<Vec<ChunkVerdict>> {
        let mut out = Vec::new();
        self.feed(data, |v| out.push(v))?;
        Ok(out)
    }

    /// Ends the stream. Fails with [`VerifyError::StreamTruncated`] unless
    /// every chunk was completed.
    pub fn finish(self) -> VerifyResult<()> {
        if self.current < self.entries.len() {
            return Err(VerifyError::StreamTruncated {
                received: self.received,
                expected: self.expected,
                verdicts: self.current,
            });
        }
        Ok(())
    }

    pub fn verdicts_emitted(&self) -> usize {
        self.current
    }

    pub fn bytes_received(&self) -> u64 {
        self.received
    }

    pub fn expected_len(&self) -> u64 {
        self.expected
    }

    pub fn chunk_count(&self) -> usize {
        self.entries.len()
    }
}

/// Pull-style adapter over a reader: yields verdicts as chunks complete, then
/// an error item if the stream was truncated or too long.
pub struct ChunkedReader<R> {
    reader: R,
    verifier: Option<ChunkStreamVerifier>,
    buf: Vec<u8>,
    pending: VecDeque<ChunkVerdict>,
    error: Option<VerifyError>,
    peak_buffered: usize,
}

impl<R: Read> ChunkedReader<R> {
    pub fn new(reader: R, verifier: ChunkStreamVerifier, block_size: usize) -> Self {
        ChunkedReader {
            reader,
            verifier: Some(verifier),
            buf: vec![0; block_size.max(1)],
            pending: VecDeque::new(),
            error: None,
            peak_buffered: 0,
        }
    }

    /// Most media bytes held at once (read block contents not yet hashed).
    pub fn peak_buffered(&self) -> usize {
        self.peak_buffered
    }

    fn pump(&mut self) {
        if self.verifier.is_none() {
            return;
        }
        let n = loop {
            match self.reader.read(&mut self.buf) {
                Ok(n) => break n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    self.error = Some(VerifyError::Io {
                        path: "<stream>".into(),
                        source: e,
                    });
                    self.verifier = None;
                    return;
                }
            }
        };
        if n == 0 {
            if let Err(e) = self.verifier.take().expect("checked above").finish() {
                self.error = Some(e);
            }
            return;
        }
        self.peak_buffered = self.peak_buffered.max(n);
        let verifier = self.verifier.as_mut().expect("checked above");
        let pending = &mut self.pending;
        if let Err(e) = verifier.feed(&self.buf[..n], |v| pending.push_back(v)) {
            self.error = Some(e);
            self.verifier = None;
        }
    }
}

impl<R: Read> Iterator for ChunkedReader<R> {
    type Item = VerifyResult<ChunkVerdict>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(v) = self.pending.pop_front() {
                return Some(Ok(v));
            }
            if let Some(e) = self.error.take() {
                return Some(Err(e));
            }
            self.verifier.as_ref()?;
            self.pump();
        }
    }
}

/// Verifies a chunked asset read from `reader` in 64 KiB blocks.
pub fn verify_chunked_reader<R: Read>(
    reader: R,
    manifest: &SidecarDocument,
    trust: &TrustStore,
) -> VerifyResult<ChunkedReader<R>> {
    Ok(ChunkedReader::new(
        reader,
        ChunkStreamVerifier::new(manifest, trust)?,
        DEFAULT_BLOCK,
    ))
}
