use std::sync::OnceLock;

use rsa::RsaPrivateKey;

use crate::metadata::EndorsementMetadata;
use crate::pki::{issue_demo_chain, DemoChain};

pub(crate) fn demo_chain() -> &'static DemoChain {
    static CHAIN: OnceLock<DemoChain> = OnceLock::new();
    CHAIN.get_or_init(|| issue_demo_chain("Example News").unwrap())
}

pub(crate) fn endorser_key() -> &'static RsaPrivateKey {
    demo_chain().endorser_key()
}

pub(crate) fn sample_meta() -> EndorsementMetadata {
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
