//! Detached endorsements for news media.
//!
//! An endorser signs the canonical preimage of an asset (seven descriptive
//! metadata fields plus the Base64 media content) with an RSA key certified
//! by a trusted root, and publishes the result as an XMP sidecar next to the
//! untouched media file. Consumers rebuild the preimage, check the signature
//! and the stored digest, and anchor the endorser certificate in their own
//! trust store.

pub mod chunking;
pub mod error;
pub mod message;
pub mod metadata;
pub mod pki;
pub mod sidecar;
pub mod signature;
pub mod verify;

#[cfg(test)]
mod test_support;

pub use chunking::{ChunkSigner, ChunkedEndorsement, DEFAULT_CHUNK_SIZE};
pub use error::{Error, Result};
pub use message::{
    canonical_message, chunk_message, compute_chunk_digest, compute_digest, digest_reader,
    CanonicalMessage, Digest, PreimageHasher,
};
pub use metadata::{EndorsementMetadata, MediaAsset, MediaKind, MetadataField};
pub use pki::{
    certificate_to_pem, decode_certificates, extract_endorser, generate_key, issue_demo_chain,
    private_key_to_pem, validate_chain, ChainValidation, DemoCa, DemoChain, EndorserIdentity,
    IssuedCertificate, SubjectName, TrustPolicy, TrustStore, ValidityWindow,
};
pub use sidecar::{
    check_key_matches, parse_sidecar, serialize_sidecar, sidecar_path_for, ChunkEntry,
    SidecarDocument, SIDECAR_EXTENSION,
};
pub use signature::{
    load_private_key, sign_chunk, sign_digest, sign_endorsement, verify_digest_signature,
    SignatureValue, MIN_MODULUS_BITS,
};
pub use verify::{
    check_integrity, establish_endorser, verify_chunk, verify_chunk_digest, verify_endorsement,
    verify_with_digest, ChunkVerdict, TrustedEndorser, VerificationReport, VerificationStatus,
};

/// Re-exported so callers can hold keys without depending on `rsa` directly.
pub use rsa::{RsaPrivateKey, RsaPublicKey};
