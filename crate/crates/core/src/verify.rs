//! The verification procedure for a sidecar and its media.

use std::fmt;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;

use crate::message::{compute_chunk_digest, compute_digest, Digest};
use crate::metadata::{EndorsementMetadata, MediaAsset};
use crate::pki::{extract_endorser, validate_chain, EndorserIdentity, TrustStore};
use crate::sidecar::{ChunkEntry, SidecarDocument};
use crate::signature::{verify_digest_signature, SignatureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerificationStatus {
    Verified,
    FailedDigestMismatch,
    FailedSignatureInvalid,
    UntrustedEndorser,
    MalformedSidecar,
    NoSidecar,
}

impl VerificationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerificationStatus::Verified => "Verified",
            VerificationStatus::FailedDigestMismatch => "FailedDigestMismatch",
            VerificationStatus::FailedSignatureInvalid => "FailedSignatureInvalid",
            VerificationStatus::UntrustedEndorser => "UntrustedEndorser",
            VerificationStatus::MalformedSidecar => "MalformedSidecar",
            VerificationStatus::NoSidecar => "NoSidecar",
        }
    }

    /// Whether this outcome should make a verification run exit unsuccessfully.
    /// A missing sidecar is not a failure: unannotated media is simply ignored.
    pub fn is_failure(self) -> bool {
        !matches!(
            self,
            VerificationStatus::Verified | VerificationStatus::NoSidecar
        )
    }
}

impl fmt::Display for VerificationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-asset verification outcome.
///
/// `endorser` and `metadata` are set together, and only when the status is
/// [`VerificationStatus::Verified`]; unverified claims are never surfaced
/// as display metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub status: VerificationStatus,
    pub endorser: Option<EndorserIdentity>,
    pub metadata: Option<EndorsementMetadata>,
    pub detail: String,
    pub asset_locator: String,
    /// Non-fatal findings, such as an expired certificate accepted by policy.
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn failure(
        status: VerificationStatus,
        asset_locator: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        debug_assert_ne!(status, VerificationStatus::Verified);
        VerificationReport {
            status,
            endorser: None,
            metadata: None,
            detail: detail.into(),
            asset_locator: asset_locator.into(),
            warnings: Vec::new(),
        }
    }

    pub fn no_sidecar(asset_locator: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::failure(VerificationStatus::NoSidecar, asset_locator, detail)
    }

    pub fn malformed(asset_locator: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::failure(VerificationStatus::MalformedSidecar, asset_locator, detail)
    }

    pub fn is_verified(&self) -> bool {
        self.status == VerificationStatus::Verified
    }

    pub fn endorser_name(&self) -> Option<&str> {
        self.endorser.as_ref().map(|e| e.display_name.as_str())
    }
}

/// Endorser identity and chain outcome, shared by whole-asset and chunk checks.
#[derive(Debug, Clone)]
pub struct TrustedEndorser {
    pub identity: EndorserIdentity,
    pub warnings: Vec<String>,
}

/// Steps 1 and 2: read the endorser out of the sidecar and anchor it in `trust`.
pub fn establish_endorser(
    sidecar: &SidecarDocument,
    trust: &TrustStore,
) -> Result<TrustedEndorser, (VerificationStatus, String)> {
    let cert_der = STANDARD.decode(&sidecar.certificate_b64).map_err(|e| {
        (
            VerificationStatus::MalformedSidecar,
            format!("certificate is not Base64: {e}"),
        )
    })?;
    let identity = extract_endorser(&cert_der)
        .map_err(|e| (VerificationStatus::MalformedSidecar, e.to_string()))?;
    let chain = validate_chain(&cert_der, trust).map_err(|reason| {
        (
            VerificationStatus::UntrustedEndorser,
            format!(
                "endorser '{}' is not trusted: {reason}",
                identity.display_name
            ),
        )
    })?;
    Ok(TrustedEndorser {
        identity,
        warnings: chain.warnings,
    })
}

fn check_signature_and_digest(
    computed: &Digest,
    signature_b64: &str,
    stored_digest_hex: &str,
    endorser: &EndorserIdentity,
) -> Result<(), (VerificationStatus, String)> {
    let signature = SignatureValue::from_b64(signature_b64)
        .map_err(|e| (VerificationStatus::MalformedSidecar, e.to_string()))?;
    if !verify_digest_signature(computed, &signature, &endorser.public_key) {
        return Err((
            VerificationStatus::FailedSignatureInvalid,
            "signature does not match the media and metadata".into(),
        ));
    }
    let stored = Digest::from_hex(stored_digest_hex)
        .map_err(|e| (VerificationStatus::MalformedSidecar, e.to_string()))?;
    if &stored != computed {
        return Err((
            VerificationStatus::FailedDigestMismatch,
            format!("stored digest {stored} differs from computed {computed}"),
        ));
    }
    Ok(())
}

/// Verifies `media` against a parsed sidecar.
///
/// Steps run in order: endorser extraction, chain validation, signature
/// check, stored digest comparison. The first failing step decides the
/// status. Never panics or errors; every outcome is a report.
pub fn verify_endorsement(
    sidecar: &SidecarDocument,
    media: &MediaAsset,
    trust: &TrustStore,
) -> VerificationReport {
    let digest = compute_digest(&sidecar.metadata, media);
    verify_with_digest(sidecar, &digest, &media.locator, trust)
}

/// Same as [`verify_endorsement`] with the preimage digest computed by the caller,
/// e.g. by streaming the media from disk.
pub fn verify_with_digest(
    sidecar: &SidecarDocument,
    digest: &Digest,
    asset_locator: &str,
    trust: &TrustStore,
) -> VerificationReport {
    let endorser = match establish_endorser(sidecar, trust) {
        Ok(e) => e,
        Err((status, detail)) => return VerificationReport::failure(status, asset_locator, detail),
    };
    match check_signature_and_digest(
        digest,
        &sidecar.signature_b64,
        &sidecar.digest_hex,
        &endorser.identity,
    ) {
        Ok(()) => VerificationReport {
            status: VerificationStatus::Verified,
            detail: format!("certified by {}", endorser.identity.display_name),
            endorser: Some(endorser.identity),
            metadata: Some(sidecar.metadata.clone()),
            asset_locator: asset_locator.to_owned(),
            warnings: endorser.warnings,
        },
        Err((status, detail)) => VerificationReport::failure(status, asset_locator, detail),
    }
}

/// Checks signature and digest of `media` under the sidecar's embedded
/// certificate without consulting any trust store. Useful to decide whether an
/// existing sidecar still matches its asset.
pub fn check_integrity(
    sidecar: &SidecarDocument,
    media: &MediaAsset,
) -> Result<(), (VerificationStatus, String)> {
    let cert_der = STANDARD
        .decode(&sidecar.certificate_b64)
        .map_err(|e| (VerificationStatus::MalformedSidecar, e.to_string()))?;
    let identity = extract_endorser(&cert_der)
        .map_err(|e| (VerificationStatus::MalformedSidecar, e.to_string()))?;
    let digest = compute_digest(&sidecar.metadata, media);
    check_signature_and_digest(
        &digest,
        &sidecar.signature_b64,
        &sidecar.digest_hex,
        &identity,
    )
}

/// Verdict for one chunk of a chunked asset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkVerdict {
    pub index: u64,
    pub byte_offset: u64,
    pub byte_length: u64,
    pub status: VerificationStatus,
    pub detail: String,
}

impl ChunkVerdict {
    pub fn is_verified(&self) -> bool {
        self.status == VerificationStatus::Verified
    }
}

/// Checks one chunk, given the digest of its chunk preimage.
pub fn verify_chunk_digest(
    entry: &ChunkEntry,
    computed: &Digest,
    endorser: &Result<TrustedEndorser, (VerificationStatus, String)>,
) -> ChunkVerdict {
    let (status, detail) = match endorser {
        Err((status, detail)) => (*status, detail.clone()),
        Ok(endorser) => {
            match check_signature_and_digest(
                computed,
                &entry.signature_b64,
                &entry.digest_hex,
                &endorser.identity,
            ) {
                Ok(()) => (
                    VerificationStatus::Verified,
                    format!("certified by {}", endorser.identity.display_name),
                ),
                Err((status, detail)) => (status, detail),
            }
        }
    };
    ChunkVerdict {
        index: entry.index,
        byte_offset: entry.byte_offset,
        byte_length: entry.byte_length,
        status,
        detail,
    }
}

/// Checks one in-memory chunk against its manifest entry.
pub fn verify_chunk(
    metadata: &EndorsementMetadata,
    entry: &ChunkEntry,
    chunk: &[u8],
    endorser: &Result<TrustedEndorser, (VerificationStatus, String)>,
) -> ChunkVerdict {
    let digest = compute_chunk_digest(metadata, entry.index, chunk);
    verify_chunk_digest(entry, &digest, endorser)
}
