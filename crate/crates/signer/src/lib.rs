//! Publisher-side endorsement workflow.
//!
//! Signs media files into detached `.xmp` sidecars (whole-file or chunked),
//! rewrites HTML so media elements point at their sidecars, and batch-signs
//! directories.

pub mod annotate;
pub mod batch;
pub mod error;
pub mod input;
pub mod sign;

pub use annotate::{annotate_html, ATTRIBUTE};
pub use batch::{
    batch_sign, is_media_file, BatchOptions, BatchSummary, MetadataSource, META_SUFFIX,
};
pub use error::{SignError, SignResult};
pub use input::{
    env_var_name, read_metadata_json, resolve_metadata, write_metadata_json, LinePrompter,
    MetadataInput, Prompter,
};
pub use sign::{sign_asset, sign_chunked, Credentials, SignRequest, MIN_CHUNK_SIZE};
