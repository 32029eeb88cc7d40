//! Verification of detached sidecar endorsements.
//!
//! Checks single files against their `.xmp` neighbours, crawls HTML pages for
//! media annotated with `x-media-cert`, verifies chunked assets while they
//! stream, and renders the results as JSON or text.

pub mod crawl;
pub mod error;
pub mod file;
pub mod report;
pub mod stream;
pub mod trust;

pub use crawl::{
    crawl_page, extract_annotated, AnnotatedMedia, Crawler, PageReport, StatusCounts, ATTRIBUTE,
};
pub use error::{VerifyError, VerifyResult};
pub use file::verify_file;
pub use report::{page_report_json, render_page_text, render_report_text, report_json};
pub use stream::{verify_chunked_reader, ChunkStreamVerifier, ChunkedReader};
pub use trust::load_trust_dir;
