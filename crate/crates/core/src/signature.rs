//! RSASSA-PKCS1-v1_5 / SHA-256 endorsement signatures.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use rsa::pkcs1::DecodeRsaPrivateKey;
use rsa::pkcs1v15::{Signature, SigningKey, VerifyingKey};
use rsa::pkcs8::DecodePrivateKey;
use rsa::signature::hazmat::{PrehashSigner, PrehashVerifier};
use rsa::signature::SignatureEncoding;
use rsa::traits::PublicKeyParts;
use rsa::{RsaPrivateKey, RsaPublicKey};
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::message::{compute_chunk_digest, compute_digest, Digest};
use crate::metadata::{EndorsementMetadata, MediaAsset};

/// Smallest accepted RSA modulus, in bits.
pub const MIN_MODULUS_BITS: usize = 2048;

/// A raw RSA signature and its Base64 rendering.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignatureValue {
    raw: Vec<u8>,
}

impl SignatureValue {
    pub fn from_raw(raw: Vec<u8>) -> Self {
        SignatureValue { raw }
    }

    /// Decodes standard, padded Base64. ASCII whitespace is ignored.
    pub fn from_b64(b64: &str) -> Result<Self> {
        let compact: String = b64.chars().filter(|c| !c.is_ascii_whitespace()).collect();
        let raw = STANDARD
            .decode(compact)
            .map_err(|e| Error::InvalidSignatureEncoding(e.to_string()))?;
        Ok(SignatureValue { raw })
    }

    pub fn raw(&self) -> &[u8] {
        &self.raw
    }

    pub fn to_b64(&self) -> String {
        STANDARD.encode(&self.raw)
    }
}

impl std::fmt::Debug for SignatureValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SignatureValue({} bytes)", self.raw.len())
    }
}

/// Parses an RSA private key from PEM (PKCS#1 or PKCS#8) or DER.
pub fn load_private_key(bytes: &[u8]) -> Result<RsaPrivateKey> {
    let key = match std::str::from_utf8(bytes) {
        Ok(text) if text.contains("-----BEGIN") => {
            if text.contains("BEGIN RSA PRIVATE KEY") {
                RsaPrivateKey::from_pkcs1_pem(text).map_err(|e| Error::InvalidKey(e.to_string()))?
            } else if text.contains("BEGIN PRIVATE KEY") {
                RsaPrivateKey::from_pkcs8_pem(text).map_err(|e| Error::InvalidKey(e.to_string()))?
            } else {
                return Err(Error::InvalidKey(
                    "no RSA private key PEM block found".into(),
                ));
            }
        }
        _ => RsaPrivateKey::from_pkcs8_der(bytes)
            .or_else(|_| RsaPrivateKey::from_pkcs1_der(bytes))
            .map_err(|e| Error::InvalidKey(e.to_string()))?,
    };
    check_key_size(&key.to_public_key())?;
    Ok(key)
}

pub(crate) fn check_key_size(key: &RsaPublicKey) -> Result<()> {
    let bits = key.n().bits();
    if bits < MIN_MODULUS_BITS {
        return Err(Error::InvalidKey(format!(
            "RSA modulus is {bits} bits, at least {MIN_MODULUS_BITS} required"
        )));
    }
    Ok(())
}

/// Signs an already computed preimage digest.
pub fn sign_digest(digest: &Digest, key: &RsaPrivateKey) -> Result<SignatureValue> {
    check_key_size(&key.to_public_key())?;
    let signer = SigningKey::<Sha256>::new(key.clone());
    let sig: Signature = signer
        .sign_prehash(digest.as_bytes())
        .map_err(|e| Error::InvalidKey(e.to_string()))?;
    Ok(SignatureValue::from_raw(sig.to_vec()))
}

/// Signs the canonical preimage of `(meta, media)`.
pub fn sign_endorsement(
    meta: &EndorsementMetadata,
    media: &MediaAsset,
    key: &RsaPrivateKey,
) -> Result<SignatureValue> {
    meta.check_signable()?;
    sign_digest(&compute_digest(meta, media), key)
}

pub fn sign_chunk(
    meta: &EndorsementMetadata,
    index: u64,
    chunk: &[u8],
    key: &RsaPrivateKey,
) -> Result<SignatureValue> {
    meta.check_signable()?;
    sign_digest(&compute_chunk_digest(meta, index, chunk), key)
}

/// Checks `signature` against a preimage digest under `key`.
pub fn verify_digest_signature(
    digest: &Digest,
    signature: &SignatureValue,
    key: &RsaPublicKey,
) -> bool {
    let Ok(sig) = Signature::try_from(signature.raw()) else {
        return false;
    };
    if signature.raw().len() != key.size() {
        return false;
    }
    VerifyingKey::<Sha256>::new(key.clone())
        .verify_prehash(digest.as_bytes(), &sig)
        .is_ok()
}
