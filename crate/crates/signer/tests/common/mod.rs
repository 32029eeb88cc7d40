#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use newscert_core::{
    certificate_to_pem, issue_demo_chain, private_key_to_pem, DemoChain, EndorsementMetadata,
    TrustPolicy, TrustStore,
};

pub fn chain() -> &'static DemoChain {
    static CHAIN: OnceLock<DemoChain> = OnceLock::new();
    CHAIN.get_or_init(|| issue_demo_chain("Example News").unwrap())
}

pub fn trust() -> TrustStore {
    chain().trust_store(TrustPolicy::Strict)
}

pub struct Workspace {
    pub dir: tempfile::TempDir,
    pub key: PathBuf,
    pub cert: PathBuf,
}

impl Workspace {
    /// Temp dir holding `endorser.key.pem` and `endorser.pem` of the shared chain.
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let key = dir.path().join("endorser.key.pem");
        let cert = dir.path().join("endorser.pem");
        std::fs::write(&key, private_key_to_pem(chain().endorser_key())).unwrap();
        std::fs::write(&cert, certificate_to_pem(chain().endorser_der())).unwrap();
        Workspace { dir, key, cert }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }
}

pub fn meta() -> EndorsementMetadata {
    EndorsementMetadata {
        date_time: "2021-03-04T05:06:07Z".into(),
        city: "Tampa".into(),
        region: "FL".into(),
        country: "US".into(),
        creator: "R. Ortiz".into(),
        headline: "Bridge reopens".into(),
        description: "Traffic returns to the causeway after \"repairs\" & inspection.".into(),
    }
}

pub fn media(len: usize, seed: u8) -> Vec<u8> {
    (0..len)
        .map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed))
        .collect()
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}
