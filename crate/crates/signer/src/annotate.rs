//! Points media elements at their sidecars.

use std::collections::HashMap;

use lol_html::{element, rewrite_str, RewriteStrSettings};

use crate::error::{SignError, SignResult};

/// Attribute carrying the sidecar URL on `img` and `video` elements.
pub const ATTRIBUTE: &str = "x-media-cert";

/// Adds `x-media-cert="<sidecar>"` to every `img`/`video` whose `src` is a key
/// of `mapping`. Everything else passes through untouched, as do elements
/// already carrying the right value, so the operation is idempotent.
pub fn annotate_html(page: &str, mapping: &HashMap<String, String>) -> SignResult<String> {
    if mapping.is_empty() {
        return Ok(page.to_owned());
    }
    let settings = RewriteStrSettings {
        element_content_handlers: vec![element!("img[src], video[src]", |el| {
            let Some(sidecar) = el.get_attribute("src").and_then(|src| mapping.get(&src)) else {
                return Ok(());
            };
            if el.get_attribute(ATTRIBUTE).as_deref() != Some(sidecar.as_str()) {
                el.set_attribute(ATTRIBUTE, sidecar)?;
            }
            Ok(())
        })],
        strict: true,
        ..RewriteStrSettings::new()
    };
    rewrite_str(page, settings).map_err(|e| SignError::UnparsableHtml(e.to_string()))
}
