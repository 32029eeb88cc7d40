use std::fs::File;
use std::io;
use std::path::Path;

use newscert_core::{
    digest_reader, parse_sidecar, sidecar_path_for, verify_with_digest, TrustStore,
    VerificationReport,
};

use crate::error::{VerifyError, VerifyResult};

/// Verifies a file on disk. The sidecar defaults to the asset path plus
/// `.xmp`. Only a missing or unreadable asset is an error; every sidecar
/// problem is reported through the status.
pub fn verify_file(
    asset: &Path,
    sidecar: Option<&Path>,
    trust: &TrustStore,
) -> VerifyResult<VerificationReport> {
    let locator = asset.display().to_string();
    let file = File::open(asset).map_err(|e| VerifyError::io(asset, e))?;

    let sidecar_path = sidecar.map_or_else(|| sidecar_path_for(asset), Path::to_owned);
    let text = match std::fs::read(&sidecar_path) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(text) => text,
            Err(_) => {
                return Ok(VerificationReport::malformed(
                    locator,
                    "sidecar is not UTF-8",
                ))
            }
        },
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Ok(VerificationReport::no_sidecar(
                locator,
                format!("no sidecar at {}", sidecar_path.display()),
            ))
        }
        Err(e) => {
            return Ok(VerificationReport::malformed(
                locator,
                format!("cannot read {}: {e}", sidecar_path.display()),
            ))
        }
    };
    let doc = match parse_sidecar(&text) {
        Ok(doc) => doc,
        Err(e) => return Ok(VerificationReport::malformed(locator, e.to_string())),
    };

    let (digest, _) = digest_reader(&doc.metadata, file).map_err(|e| VerifyError::io(asset, e))?;
    Ok(verify_with_digest(&doc, &digest, &locator, trust))
}
