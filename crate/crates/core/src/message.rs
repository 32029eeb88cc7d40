//! Canonical preimage construction and SHA-256 digests.
//!
//! The preimage is the seven metadata fields, each terminated by a single
//! LF byte, followed by the unwrapped, padded standard Base64 encoding of
//! the media bytes. Chunk preimages insert the decimal chunk index and an LF
//! between the metadata block and the Base64 payload.

use std::fmt;
use std::io::{self, Read, Write};

use base64::engine::general_purpose::STANDARD;
use base64::write::EncoderWriter;
use base64::Engine as _;
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};
use crate::metadata::{EndorsementMetadata, MediaAsset};

const FIELD_DELIMITER: u8 = b'\n';

/// The exact byte sequence fed to the hash and the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalMessage {
    bytes: Vec<u8>,
}

impl CanonicalMessage {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn digest(&self) -> Digest {
        Digest(Sha256::digest(&self.bytes).into())
    }
}

impl AsRef<[u8]> for CanonicalMessage {
    fn as_ref(&self) -> &[u8] {
        &self.bytes
    }
}

fn metadata_block(meta: &EndorsementMetadata) -> Vec<u8> {
    let mut out = Vec::new();
    for value in meta.values() {
        out.extend_from_slice(value.as_bytes());
        out.push(FIELD_DELIMITER);
    }
    out
}

/// Builds the preimage for a whole asset.
pub fn canonical_message(meta: &EndorsementMetadata, media: &MediaAsset) -> CanonicalMessage {
    let mut bytes = metadata_block(meta);
    bytes.extend_from_slice(STANDARD.encode(&media.bytes).as_bytes());
    CanonicalMessage { bytes }
}

/// Builds the preimage for one chunk of a chunked asset.
pub fn chunk_message(meta: &EndorsementMetadata, index: u64, chunk: &[u8]) -> CanonicalMessage {
    let mut bytes = metadata_block(meta);
    bytes.extend_from_slice(index.to_string().as_bytes());
    bytes.push(FIELD_DELIMITER);
    bytes.extend_from_slice(STANDARD.encode(chunk).as_bytes());
    CanonicalMessage { bytes }
}

/// A SHA-256 value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; 32]);

impl Digest {
    pub const LEN: usize = 32;

    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Lowercase, 64 characters.
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Accepts 64 hex characters in either case.
    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() != 64 {
            return Err(Error::InvalidDigest(format!(
                "expected 64 hex characters, found {}",
                s.len()
            )));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|e| Error::InvalidDigest(e.to_string()))?;
        Ok(Digest(out))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// SHA-256 over the canonical preimage of `(meta, media)`.
pub fn compute_digest(meta: &EndorsementMetadata, media: &MediaAsset) -> Digest {
    let mut hasher = PreimageHasher::new(meta, None);
    hasher.update(&media.bytes);
    hasher.finalize()
}

/// SHA-256 over the chunk preimage.
pub fn compute_chunk_digest(meta: &EndorsementMetadata, index: u64, chunk: &[u8]) -> Digest {
    let mut hasher = PreimageHasher::new(meta, Some(index));
    hasher.update(chunk);
    hasher.finalize()
}

/// Hashes the preimage incrementally, never holding the media in memory.
///
/// Media bytes are Base64-encoded on the fly; the encoder buffers at most
/// two pending input bytes between calls.
pub struct PreimageHasher {
    encoder: EncoderWriter<'static, base64::engine::GeneralPurpose, Sha256>,
    media_len: u64,
}

impl PreimageHasher {
    pub fn new(meta: &EndorsementMetadata, chunk_index: Option<u64>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(metadata_block(meta));
        if let Some(index) = chunk_index {
            hasher.update(index.to_string().as_bytes());
            hasher.update([FIELD_DELIMITER]);
        }
        PreimageHasher {
            encoder: EncoderWriter::new(hasher, &STANDARD),
            media_len: 0,
        }
    }

    pub fn update(&mut self, media: &[u8]) {
        // Writing into a hasher cannot fail.
        self.encoder
            .write_all(media)
            .expect("hashing sink is infallible");
        self.media_len += media.len() as u64;
    }

    /// Number of media bytes consumed so far.
    pub fn media_len(&self) -> u64 {
        self.media_len
    }

    pub fn finalize(mut self) -> Digest {
        let hasher = self.encoder.finish().expect("hashing sink is infallible");
        Digest(hasher.finalize().into())
    }
}

impl Write for PreimageHasher {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Digest of the whole-asset preimage, streaming the media from `reader`.
pub fn digest_reader<R: Read>(
    meta: &EndorsementMetadata,
    mut reader: R,
) -> io::Result<(Digest, u64)> {
    let mut hasher = PreimageHasher::new(meta, None);
    io::copy(&mut reader, &mut hasher)?;
    let len = hasher.media_len();
    Ok((hasher.finalize(), len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_meta() -> EndorsementMetadata {
        EndorsementMetadata {
            date_time: "2020-01-01T00:00:00Z".into(),
            city: "Orlando".into(),
            region: "FL".into(),
            country: "US".into(),
            creator: "A. Photographer".into(),
            headline: "Headline".into(),
            description: "Desc.".into(),
        }
    }

    #[test]
    fn empty_input_is_seven_line_feeds() {
        let msg = canonical_message(
            &EndorsementMetadata::default(),
            &MediaAsset::new(vec![], ""),
        );
        assert_eq!(msg.as_bytes(), b"\n\n\n\n\n\n\n");
    }

    #[test]
    fn single_zero_byte_media_ends_in_padded_base64() {
        let msg = canonical_message(&sample_meta(), &MediaAsset::new(vec![0], "x"));
        assert!(msg.as_bytes().ends_with(b"Desc.\nAA=="));
    }

    #[test]
    fn deterministic() {
        let media = MediaAsset::new((0..=255u8).collect(), "x");
        assert_eq!(
            canonical_message(&sample_meta(), &media),
            canonical_message(&sample_meta(), &media)
        );
        assert_eq!(
            compute_digest(&sample_meta(), &media),
            compute_digest(&sample_meta(), &media)
        );
    }

    // Golden values computed with sha256sum / openssl dgst over hand-built preimages.
    #[test]
    fn golden_digests() {
        let empty = compute_digest(
            &EndorsementMetadata::default(),
            &MediaAsset::new(vec![], ""),
        );
        assert_eq!(
            empty.to_hex(),
            "538d6440534fa5f615e8a26932792a82a2e4a33a97886e2d815eab8fc216d415"
        );
        let sample = compute_digest(&sample_meta(), &MediaAsset::new(vec![0], ""));
        assert_eq!(
            sample.to_hex(),
            "8086783fece962879e41bcb215e091b33bb052d204e16198e4bcaf88ff36dbc3"
        );
        let meta = EndorsementMetadata {
            date_time: "a".into(),
            city: "b".into(),
            region: "c".into(),
            country: "d".into(),
            creator: "e".into(),
            headline: "f".into(),
            description: "g".into(),
        };
        assert_eq!(
            compute_chunk_digest(&meta, 3, b"xyz").to_hex(),
            "509f2170ff178cfd27e50d78c4aae6b604be63d31f65d06d1685a4734bfae3f8"
        );
    }

    #[test]
    fn boundary_shift_changes_preimage() {
        let mut a = sample_meta();
        a.city = "ab".into();
        a.region = "c".into();
        let mut b = sample_meta();
        b.city = "a".into();
        b.region = "bc".into();
        let media = MediaAsset::new(vec![1, 2, 3], "");
        assert_ne!(canonical_message(&a, &media), canonical_message(&b, &media));
    }

    #[test]
    fn chunk_message_binds_index() {
        let m = sample_meta();
        let msg = chunk_message(&m, 12, b"\x00");
        assert!(msg.as_bytes().ends_with(b"Desc.\n12\nAA=="));
        assert_ne!(chunk_message(&m, 1, b"abc"), chunk_message(&m, 2, b"abc"));
    }

    #[test]
    fn digest_hex_round_trip_and_rejects_bad_length() {
        let d = compute_digest(&sample_meta(), &MediaAsset::new(vec![9; 10], ""));
        assert_eq!(Digest::from_hex(&d.to_hex()).unwrap(), d);
        assert_eq!(Digest::from_hex(&d.to_hex().to_uppercase()).unwrap(), d);
        assert!(Digest::from_hex("abcd").is_err());
        assert!(Digest::from_hex(&"zz".repeat(32)).is_err());
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Streaming route must agree with the materialized preimage for any split.
            #[test]
            fn streaming_matches_materialized(
                media in proptest::collection::vec(any::<u8>(), 0..2048),
                split in proptest::collection::vec(1usize..97, 0..40),
                city in ".*",
            ) {
                let mut meta = sample_meta();
                meta.city = city;
                let asset = MediaAsset::new(media.clone(), "");
                let expected = canonical_message(&meta, &asset).digest();
                let mut hasher = PreimageHasher::new(&meta, None);
                let mut rest: &[u8] = &media;
                for step in split {
                    let n = step.min(rest.len());
                    hasher.update(&rest[..n]);
                    rest = &rest[n..];
                }
                hasher.update(rest);
                prop_assert_eq!(hasher.finalize(), expected);
                prop_assert_eq!(compute_digest(&meta, &asset), expected);
            }

            #[test]
            fn chunk_streaming_matches_materialized(
                chunk in proptest::collection::vec(any::<u8>(), 0..512),
                index in any::<u64>(),
            ) {
                let meta = sample_meta();
                prop_assert_eq!(
                    compute_chunk_digest(&meta, index, &chunk),
                    chunk_message(&meta, index, &chunk).digest()
                );
            }
        }
    }
}
