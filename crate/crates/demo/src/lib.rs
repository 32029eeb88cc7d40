//! Demo fixtures: a generated, partly signed news site and a small static
//! file server that can serve selected assets with a corrupted last byte.

pub mod error;
pub mod server;
pub mod site;

pub use error::{DemoError, DemoResult};
pub use server::{serve, ServeConfig, ServerHandle, TlsIdentity};
pub use site::{build_demo_site, DemoSite, ENDORSER_NAME};
