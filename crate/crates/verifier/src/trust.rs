use std::path::Path;

use newscert_core::{TrustPolicy, TrustStore};

use crate::error::{VerifyError, VerifyResult};

const CERT_EXTENSIONS: &[&str] = &["pem", "crt", "cer"];

/// Loads every `.pem`/`.crt`/`.cer` file in `dir` as trusted roots. A single
/// file path is accepted as well. An empty directory yields an empty store,
/// under which nothing verifies.
pub fn load_trust_dir(dir: &Path, policy: TrustPolicy) -> VerifyResult<TrustStore> {
    let meta = std::fs::metadata(dir).map_err(|e| VerifyError::io(dir, e))?;
    let files = if meta.is_dir() {
        let mut files = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| VerifyError::io(dir, e))? {
            let path = entry.map_err(|e| VerifyError::io(dir, e))?.path();
            let is_cert = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| CERT_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
            if is_cert && path.is_file() {
                files.push(path);
            }
        }
        files.sort();
        files
    } else {
        vec![dir.to_owned()]
    };

    let mut store = TrustStore::new(policy);
    for path in files {
        let bytes = std::fs::read(&path).map_err(|e| VerifyError::io(&path, e))?;
        store
            .add_roots_pem(&bytes)
            .map_err(|e| VerifyError::Trust(format!("{}: {e}", path.display())))?;
    }
    Ok(store)
}
