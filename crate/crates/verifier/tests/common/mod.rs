#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use newscert_core::{
    issue_demo_chain, serialize_sidecar, DemoChain, EndorsementMetadata, MediaAsset,
    SidecarDocument, TrustPolicy, TrustStore,
};

pub fn chain() -> &'static DemoChain {
    static CHAIN: OnceLock<DemoChain> = OnceLock::new();
    CHAIN.get_or_init(|| issue_demo_chain("Example News").unwrap())
}

pub fn trust() -> TrustStore {
    chain().trust_store(TrustPolicy::Strict)
}

pub fn meta() -> EndorsementMetadata {
    EndorsementMetadata {
        date_time: "2022-08-09T10:11:12+02:00".into(),
        city: "Köln".into(),
        region: "NRW".into(),
        country: "DE".into(),
        creator: "M. Weber".into(),
        headline: "Cathedral at dusk".into(),
        description: "Long exposure <from> the Rhine & Hohenzollern bridge.".into(),
    }
}

pub fn media(len: usize, seed: u8) -> Vec<u8> {
    (0..len)
        .map(|i| (i as u8).wrapping_mul(17).wrapping_add(seed))
        .collect()
}

pub fn sidecar_for(bytes: &[u8]) -> SidecarDocument {
    let c = chain();
    SidecarDocument::endorse(
        &meta(),
        &MediaAsset::new(bytes.to_vec(), ""),
        c.endorser_key(),
        c.endorser_der(),
    )
    .unwrap()
}

/// Writes `name` and, signed, `name.xmp` into `dir`.
pub fn write_signed(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let asset = dir.join(name);
    std::fs::write(&asset, bytes).unwrap();
    std::fs::write(
        dir.join(format!("{name}.xmp")),
        serialize_sidecar(&sidecar_for(bytes)),
    )
    .unwrap();
    asset
}

pub fn flip_last_byte(path: &Path) {
    let mut bytes = std::fs::read(path).unwrap();
    *bytes.last_mut().unwrap() ^= 0xFF;
    std::fs::write(path, bytes).unwrap();
}
