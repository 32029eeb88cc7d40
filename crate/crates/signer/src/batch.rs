//! Signing every media file in a directory.

use std::path::{Path, PathBuf};

use newscert_core::{
    check_integrity, parse_sidecar, sidecar_path_for, EndorsementMetadata, MediaAsset,
};
use rayon::prelude::*;

use crate::error::{SignError, SignResult};
use crate::input::read_metadata_json;
use crate::sign::{sign_with, Credentials, SignRequest};

/// Suffix of per-asset metadata files: `photo.jpg` reads `photo.jpg.meta.json`.
pub const META_SUFFIX: &str = ".meta.json";

const MEDIA_EXTENSIONS: &[&str] = &[
    "jpg", "jpeg", "png", "gif", "webp", "tif", "tiff", "bmp", "heic", "avif", "mp4", "m4v", "mov",
    "webm", "mkv", "avi",
];

#[derive(Debug, Clone)]
pub enum MetadataSource {
    /// The same metadata for every file.
    Shared(EndorsementMetadata),
    /// Each asset's `<asset>.meta.json`, falling back to `default` when absent.
    PerFile {
        default: Option<EndorsementMetadata>,
    },
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub metadata: MetadataSource,
    /// Re-sign files whose existing sidecar still matches.
    pub force: bool,
    pub chunk_size: Option<u64>,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct BatchSummary {
    pub signed: Vec<PathBuf>,
    pub skipped: Vec<PathBuf>,
    pub failed: Vec<(PathBuf, String)>,
}

impl BatchSummary {
    pub fn is_success(&self) -> bool {
        self.failed.is_empty()
    }
}

enum Outcome {
    Signed,
    Skipped,
    Failed(String),
}

pub fn is_media_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| MEDIA_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Signs the media files directly inside `dir` (not recursive) in parallel.
/// Per-file problems land in the summary; only an unreadable directory is an
/// error. Summary lists are sorted by path.
pub fn batch_sign(
    dir: &Path,
    creds: &Credentials,
    opts: &BatchOptions,
) -> SignResult<BatchSummary> {
    let mut assets = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| SignError::io(dir, e))? {
        let path = entry.map_err(|e| SignError::io(dir, e))?.path();
        if is_media_file(&path) && !path.is_dir() {
            assets.push(path);
        }
    }
    assets.sort();

    let outcomes: Vec<(PathBuf, Outcome)> = assets
        .into_par_iter()
        .map(|path| {
            let outcome = match process(&path, creds, opts) {
                Ok(true) => Outcome::Signed,
                Ok(false) => Outcome::Skipped,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (path, outcome)
        })
        .collect();

    let mut summary = BatchSummary::default();
    for (path, outcome) in outcomes {
        match outcome {
            Outcome::Signed => summary.signed.push(path),
            Outcome::Skipped => summary.skipped.push(path),
            Outcome::Failed(reason) => summary.failed.push((path, reason)),
        }
    }
    Ok(summary)
}

fn process(path: &Path, creds: &Credentials, opts: &BatchOptions) -> SignResult<bool> {
    if !opts.force && has_valid_sidecar(path) {
        return Ok(false);
    }
    let metadata = match &opts.metadata {
        MetadataSource::Shared(meta) => meta.clone(),
        MetadataSource::PerFile { default } => {
            let mut meta_path = path.as_os_str().to_owned();
            meta_path.push(META_SUFFIX);
            let meta_path = PathBuf::from(meta_path);
            if meta_path.exists() {
                read_metadata_json(&meta_path)?
            } else {
                default.clone().ok_or_else(|| {
                    SignError::InvalidMetadata(format!("no {} file", meta_path.display()))
                })?
            }
        }
    };
    let req = SignRequest {
        asset_path: path.to_owned(),
        metadata,
        key_path: PathBuf::new(),
        cert_chain_path: PathBuf::new(),
        output_path: None,
        chunk_size: opts.chunk_size,
    };
    sign_with(&req, creds)?;
    Ok(true)
}

/// True when the neighbouring sidecar parses and matches the asset bytes.
fn has_valid_sidecar(asset: &Path) -> bool {
    let Ok(text) = std::fs::read_to_string(sidecar_path_for(asset)) else {
        return false;
    };
    let Ok(doc) = parse_sidecar(&text) else {
        return false;
    };
    let Ok(bytes) = std::fs::read(asset) else {
        return false;
    };
    check_integrity(&doc, &MediaAsset::new(bytes, asset.to_string_lossy())).is_ok()
}
