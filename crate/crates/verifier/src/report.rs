//! JSON and plain-text renderings of verification results.

use newscert_core::{MetadataField, VerificationReport};
use serde_json::{json, Map, Value};

use crate::crawl::PageReport;

/// One report as a JSON object:
/// `{asset, status, endorser, metadata: {dateTime, ...}, detail, warnings}`.
/// `endorser` and `metadata` are `null` unless the asset verified.
pub fn report_json(report: &VerificationReport) -> Value {
    let metadata = report.metadata.as_ref().map(|m| {
        MetadataField::ALL
            .into_iter()
            .map(|f| (f.key().to_owned(), Value::String(m.get(f).to_owned())))
            .collect::<Map<_, _>>()
    });
    json!({
        "asset": report.asset_locator,
        "status": report.status.as_str(),
        "endorser": report.endorser_name(),
        "metadata": metadata,
        "detail": report.detail,
        "warnings": report.warnings,
    })
}

pub fn page_report_json(page: &PageReport) -> Value {
    let s = &page.summary;
    json!({
        "page": page.page_locator,
        "entries": page.entries.iter().map(report_json).collect::<Vec<_>>(),
        "summary": {
            "verified": s.verified,
            "failed": s.failed,
            "noSidecar": s.no_sidecar,
            "malformed": s.malformed,
            "untrusted": s.untrusted,
        },
    })
}

/// Multi-line human summary; verified assets list the endorsed metadata.
pub fn render_report_text(report: &VerificationReport) -> String {
    let mut out = format!("{}: {}", report.asset_locator, report.status);
    match (&report.endorser, &report.metadata) {
        (Some(endorser), Some(meta)) => {
            out.push_str(&format!("\n  Certified by: {}", endorser.display_name));
            out.push_str(&format!("\n  Date and time: {}", meta.date_time));
            out.push_str(&format!(
                "\n  Location: {}, {}, {}",
                meta.city, meta.region, meta.country
            ));
            out.push_str(&format!("\n  Photographer: {}", meta.creator));
            out.push_str(&format!("\n  Headline: {}", meta.headline));
            out.push_str(&format!("\n  Description: {}", meta.description));
        }
        _ => out.push_str(&format!("\n  {}", report.detail)),
    }
    for w in &report.warnings {
        out.push_str(&format!("\n  warning: {w}"));
    }
    out
}

pub fn render_page_text(page: &PageReport) -> String {
    let mut out = format!("page: {}\n", page.page_locator);
    for entry in &page.entries {
        out.push_str(&render_report_text(entry));
        out.push('\n');
    }
    let s = &page.summary;
    out.push_str(&format!(
        "verified {}, failed {}, no sidecar {}, malformed {}, untrusted {}\n",
        s.verified, s.failed, s.no_sidecar, s.malformed, s.untrusted
    ));
    out
}
