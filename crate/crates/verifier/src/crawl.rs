//! Page crawling: find annotated media, fetch sidecars and assets, verify.

use std::cell::RefCell;
use std::path::Path;

use futures::stream::{self, StreamExt};
use lol_html::{element, HtmlRewriter, Settings};
use newscert_core::{
    parse_sidecar, verify_endorsement, MediaAsset, TrustStore, VerificationReport,
    VerificationStatus,
};
use url::Url;

use crate::error::{VerifyError, VerifyResult};

/// Attribute naming the sidecar URL of an `img` or `video`.
pub const ATTRIBUTE: &str = "x-media-cert";

const MAX_REDIRECTS: usize = 5;

/// An annotated media element in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedMedia {
    pub position: usize,
    pub tag: String,
    /// `src` of the element, or of the first nested `<source>` for video.
    pub src: Option<String>,
    pub sidecar: String,
}

/// Counts per outcome; both `Failed*` statuses count as `failed`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub verified: usize,
    pub failed: usize,
    pub no_sidecar: usize,
    pub malformed: usize,
    pub untrusted: usize,
}

impl StatusCounts {
    pub fn tally<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>) -> Self {
        let mut counts = StatusCounts::default();
        for r in reports {
            match r.status {
                VerificationStatus::Verified => counts.verified += 1,
                VerificationStatus::FailedDigestMismatch
                | VerificationStatus::FailedSignatureInvalid => counts.failed += 1,
                VerificationStatus::NoSidecar => counts.no_sidecar += 1,
                VerificationStatus::MalformedSidecar => counts.malformed += 1,
                VerificationStatus::UntrustedEndorser => counts.untrusted += 1,
            }
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageReport {
    pub page_locator: String,
    /// Sorted by asset locator, then document position.
    pub entries: Vec<VerificationReport>,
    pub summary: StatusCounts,
}

impl PageReport {
    pub fn has_failures(&self) -> bool {
        self.entries.iter().any(|e| e.status.is_failure())
    }
}

/// Lists `img`/`video` elements carrying [`ATTRIBUTE`], in document order.
/// Attribute values are entity-decoded.
pub fn extract_annotated(html: &[u8]) -> VerifyResult<Vec<AnnotatedMedia>> {
    let found: RefCell<Vec<AnnotatedMedia>> = RefCell::new(Vec::new());
    let decode = |v: String| html_escape::decode_html_entities(&v).into_owned();
    let mut rewriter = HtmlRewriter::new(
        Settings {
            element_content_handlers: vec![
                element!("img[x-media-cert], video[x-media-cert]", |el| {
                    let mut found = found.borrow_mut();
                    let position = found.len();
                    found.push(AnnotatedMedia {
                        position,
                        tag: el.tag_name(),
                        src: el.get_attribute("src").map(decode),
                        sidecar: el.get_attribute(ATTRIBUTE).map(decode).unwrap_or_default(),
                    });
                    Ok(())
                }),
                element!("video[x-media-cert] source[src]", |el| {
                    let mut found = found.borrow_mut();
                    if let Some(video) = found.iter_mut().rev().find(|m| m.tag == "video") {
                        if video.src.is_none() {
                            video.src = el.get_attribute("src").map(decode);
                        }
                    }
                    Ok(())
                }),
            ],
            ..Settings::new()
        },
        |_: &[u8]| {},
    );
    rewriter
        .write(html)
        .and_then(|()| rewriter.end())
        .map_err(|e| VerifyError::PageUnreachable(format!("cannot parse page: {e}")))?;
    Ok(found.into_inner())
}

enum FetchError {
    NotFound,
    Other(String),
}

/// Reusable crawler holding the HTTP client.
#[derive(Debug, Clone)]
pub struct Crawler {
    client: reqwest::Client,
    concurrency: usize,
}

impl Crawler {
    pub fn new(concurrency: usize) -> Self {
        let client = reqwest::Client::builder()
            .redirect(reqwest::redirect::Policy::limited(MAX_REDIRECTS))
            .build()
            .expect("HTTP client configuration is static");
        Crawler {
            client,
            concurrency: concurrency.max(1),
        }
    }

    /// Verifies every annotated media element on `page` (an http(s) or file
    /// URL, or a filesystem path). Elements without the attribute are ignored.
    pub async fn crawl(&self, page: &str, trust: &TrustStore) -> VerifyResult<PageReport> {
        let page_url = page_url(page)?;
        let html = self.fetch(&page_url).await.map_err(|e| {
            VerifyError::PageUnreachable(match e {
                FetchError::NotFound => format!("{page_url}: not found"),
                FetchError::Other(m) => format!("{page_url}: {m}"),
            })
        })?;
        let annotated = extract_annotated(&html)?;

        let mut entries: Vec<(usize, VerificationReport)> = stream::iter(annotated)
            .map(|media| {
                let page_url = &page_url;
                async move { (media.position, self.check(page_url, &media, trust).await) }
            })
            .buffer_unordered(self.concurrency)
            .collect()
            .await;
        entries.sort_by(|(ia, a), (ib, b)| a.asset_locator.cmp(&b.asset_locator).then(ia.cmp(ib)));
        let entries: Vec<_> = entries.into_iter().map(|(_, r)| r).collect();
        Ok(PageReport {
            page_locator: page_url.to_string(),
            summary: StatusCounts::tally(&entries),
            entries,
        })
    }

    async fn check(
        &self,
        page: &Url,
        media: &AnnotatedMedia,
        trust: &TrustStore,
    ) -> VerificationReport {
        let Some(src) = &media.src else {
            let locator = format!("{page}#{}[{}]", media.tag, media.position);
            return VerificationReport::malformed(locator, "annotated element has no media source");
        };
        let asset_url = match page.join(src) {
            Ok(u) => u,
            Err(e) => {
                return VerificationReport::malformed(src.clone(), format!("bad media URL: {e}"))
            }
        };
        let locator = asset_url.to_string();
        let sidecar_url = match page.join(&media.sidecar) {
            Ok(u) => u,
            Err(e) => {
                return VerificationReport::malformed(locator, format!("bad sidecar URL: {e}"))
            }
        };

        let sidecar = match self.fetch(&sidecar_url).await {
            Ok(bytes) => bytes,
            Err(FetchError::NotFound) => {
                return VerificationReport::no_sidecar(
                    locator,
                    format!("sidecar {sidecar_url} not found"),
                )
            }
            Err(FetchError::Other(m)) => {
                return VerificationReport::no_sidecar(
                    locator,
                    format!("fetch error: {sidecar_url}: {m}"),
                )
            }
        };
        let doc = match std::str::from_utf8(&sidecar)
            .map_err(|_| "sidecar is not UTF-8".to_owned())
            .and_then(|text| parse_sidecar(text).map_err(|e| e.to_string()))
        {
            Ok(doc) => doc,
            Err(detail) => return VerificationReport::malformed(locator, detail),
        };
        let bytes = match self.fetch(&asset_url).await {
            Ok(bytes) => bytes,
            Err(FetchError::NotFound) => {
                return VerificationReport::no_sidecar(
                    locator,
                    format!("fetch error: {asset_url} not found"),
                )
            }
            Err(FetchError::Other(m)) => {
                return VerificationReport::no_sidecar(
                    locator,
                    format!("fetch error: {asset_url}: {m}"),
                )
            }
        };
        verify_endorsement(&doc, &MediaAsset::new(bytes, locator.clone()), trust)
    }

    async fn fetch(&self, url: &Url) -> Result<Vec<u8>, FetchError> {
        match url.scheme() {
            "file" => {
                let path = url
                    .to_file_path()
                    .map_err(|()| FetchError::Other("not a local path".into()))?;
                tokio::fs::read(&path).await.map_err(|e| match e.kind() {
                    std::io::ErrorKind::NotFound => FetchError::NotFound,
                    _ => FetchError::Other(e.to_string()),
                })
            }
            "http" | "https" => {
                let resp = self
                    .client
                    .get(url.clone())
                    .send()
                    .await
                    .map_err(|e| FetchError::Other(describe(&e)))?;
                let status = resp.status();
                if status == reqwest::StatusCode::NOT_FOUND || status == reqwest::StatusCode::GONE {
                    return Err(FetchError::NotFound);
                }
                if !status.is_success() {
                    return Err(FetchError::Other(format!("HTTP {status}")));
                }
                resp.bytes()
                    .await
                    .map(|b| b.to_vec())
                    .map_err(|e| FetchError::Other(describe(&e)))
            }
            other => Err(FetchError::Other(format!("unsupported scheme '{other}'"))),
        }
    }
}

fn describe(e: &reqwest::Error) -> String {
    if e.is_redirect() {
        format!("more than {MAX_REDIRECTS} redirects")
    } else {
        let mut msg = e.to_string();
        let mut source = std::error::Error::source(e);
        while let Some(s) = source {
            msg.push_str(": ");
            msg.push_str(&s.to_string());
            source = s.source();
        }
        msg
    }
}

fn page_url(page: &str) -> VerifyResult<Url> {
    if let Ok(url) = Url::parse(page) {
        if matches!(url.scheme(), "http" | "https" | "file") {
            return Ok(url);
        }
    }
    let path = Path::new(page);
    let abs = std::fs::canonicalize(path)
        .map_err(|e| VerifyError::PageUnreachable(format!("{page}: {e}")))?;
    Url::from_file_path(&abs)
        .map_err(|()| VerifyError::PageUnreachable(format!("{page}: not a usable path")))
}

/// Convenience wrapper around [`Crawler::crawl`].
pub async fn crawl_page(
    page: &str,
    trust: &TrustStore,
    concurrency: usize,
) -> VerifyResult<PageReport> {
    Crawler::new(concurrency).crawl(page, trust).await
}
