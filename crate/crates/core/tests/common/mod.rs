#![allow(dead_code)]

use std::path::PathBuf;

use newscert_core::{
    decode_certificates, load_private_key, EndorsementMetadata, RsaPrivateKey, TrustPolicy,
    TrustStore,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap()
}

pub fn endorser_key() -> RsaPrivateKey {
    load_private_key(&fixture("endorser.key.pem")).unwrap()
}

pub fn endorser_der() -> Vec<u8> {
    decode_certificates(&fixture("endorser.pem"))
        .unwrap()
        .remove(0)
}

pub fn fixture_trust() -> TrustStore {
    let mut trust = TrustStore::new(TrustPolicy::Strict);
    trust.add_roots_pem(&fixture("root.pem")).unwrap();
    trust
}

pub fn golden_meta() -> EndorsementMetadata {
    EndorsementMetadata {
        date_time: "2020-06-01T14:30:00-04:00".into(),
        city: "Orlando".into(),
        region: "Florida".into(),
        country: "United States".into(),
        creator: "Jane Q. Photographer".into(),
        headline: "Storm clouds over Lake Eola".into(),
        description: "A thunderstorm rolls in over downtown <Orlando> & the lake.".into(),
    }
}

pub fn golden_media(len: usize) -> Vec<u8> {
    (0..len as u32)
        .map(|i| (i.wrapping_mul(2654435761) >> 24) as u8)
        .collect()
}
