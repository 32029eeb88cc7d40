//! The XMP sidecar document: a fixed news-item template carrying the
//! endorsement metadata, the preimage digest, the signature and the
//! endorser certificate, plus an optional per-chunk manifest.
//!
//! Values are addressed by element-name path, ignoring namespace prefixes.
//! Literal whitespace around element text is insignificant and trimmed on
//! parse; whitespace that belongs to a value is written as a character
//! reference so it survives the round trip.

use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rsa::RsaPrivateKey;

use crate::error::{Error, Result};
use crate::message::{compute_digest, Digest};
use crate::metadata::{EndorsementMetadata, MediaAsset, MetadataField};
use crate::pki::extract_endorser;
use crate::signature::sign_digest;

/// Extension appended to the full asset file name.
pub const SIDECAR_EXTENSION: &str = "xmp";

/// `photo.jpeg` → `photo.jpeg.xmp`, next to the asset.
pub fn sidecar_path_for(asset: &Path) -> PathBuf {
    let mut name = asset.as_os_str().to_owned();
    name.push(".");
    name.push(SIDECAR_EXTENSION);
    PathBuf::from(name)
}

/// One entry of a chunk manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkEntry {
    pub index: u64,
    pub byte_offset: u64,
    pub byte_length: u64,
    pub digest_hex: String,
    pub signature_b64: String,
}

/// Parsed form of a sidecar file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidecarDocument {
    pub metadata: EndorsementMetadata,
    pub digest_hex: String,
    pub signature_b64: String,
    pub certificate_b64: String,
    pub chunks: Option<Vec<ChunkEntry>>,
}

impl SidecarDocument {
    /// Signs `media` and assembles the sidecar for it.
    pub fn endorse(
        meta: &EndorsementMetadata,
        media: &MediaAsset,
        key: &RsaPrivateKey,
        certificate_der: &[u8],
    ) -> Result<Self> {
        Self::endorse_digest(meta, &compute_digest(meta, media), key, certificate_der)
    }

    /// Like [`SidecarDocument::endorse`] for a preimage digest the caller
    /// computed, typically by streaming the asset.
    pub fn endorse_digest(
        meta: &EndorsementMetadata,
        digest: &Digest,
        key: &RsaPrivateKey,
        certificate_der: &[u8],
    ) -> Result<Self> {
        meta.check_signable()?;
        check_key_matches(key, certificate_der)?;
        let signature = sign_digest(digest, key)?;
        Ok(SidecarDocument {
            metadata: meta.clone(),
            digest_hex: digest.to_hex(),
            signature_b64: signature.to_b64(),
            certificate_b64: STANDARD.encode(certificate_der),
            chunks: None,
        })
    }

    pub fn is_chunked(&self) -> bool {
        self.chunks.as_ref().is_some_and(|c| !c.is_empty())
    }

    pub fn certificate_der(&self) -> Result<Vec<u8>> {
        STANDARD
            .decode(&self.certificate_b64)
            .map_err(|e| Error::sidecar(format!("X509Certificate is not Base64: {e}")))
    }

    /// Total asset length described by the chunk manifest.
    pub fn chunked_length(&self) -> Option<u64> {
        self.chunks
            .as_ref()
            .map(|chunks| chunks.iter().map(|c| c.byte_length).sum())
    }

    /// Checks the document invariants and normalizes encodings in place.
    pub fn validate(&mut self) -> Result<()> {
        self.digest_hex = normalize_digest(&self.digest_hex, "DigestValue")?;
        self.signature_b64 = normalize_b64(&self.signature_b64, "SignatureValue")?;
        self.certificate_b64 = normalize_b64(&self.certificate_b64, "X509Certificate")?;
        if let Some(chunks) = &mut self.chunks {
            if chunks.is_empty() {
                return Err(Error::sidecar("chunk manifest is empty"));
            }
            let mut expected_offset = 0u64;
            for (position, chunk) in chunks.iter_mut().enumerate() {
                if chunk.index != position as u64 {
                    return Err(Error::sidecar(format!(
                        "chunk indices must be contiguous from 0, found {} at position {position}",
                        chunk.index
                    )));
                }
                if chunk.byte_offset != expected_offset {
                    return Err(Error::sidecar(format!(
                        "chunk {} starts at {} but previous chunks end at {expected_offset}",
                        chunk.index, chunk.byte_offset
                    )));
                }
                if chunk.byte_length == 0 {
                    return Err(Error::sidecar(format!(
                        "chunk {} has zero length",
                        chunk.index
                    )));
                }
                expected_offset = expected_offset
                    .checked_add(chunk.byte_length)
                    .ok_or_else(|| Error::sidecar("chunk ranges overflow"))?;
                chunk.digest_hex = normalize_digest(&chunk.digest_hex, "chunk hash")?;
                chunk.signature_b64 = normalize_b64(&chunk.signature_b64, "chunk signature")?;
            }
        }
        Ok(())
    }
}

/// Fails with `InvalidKey` unless `key` is the private half of the certificate key.
pub fn check_key_matches(key: &RsaPrivateKey, certificate_der: &[u8]) -> Result<()> {
    let endorser = extract_endorser(certificate_der)?;
    if endorser.public_key != key.to_public_key() {
        return Err(Error::InvalidKey(
            "private key does not match the endorser certificate".into(),
        ));
    }
    Ok(())
}

fn normalize_digest(value: &str, what: &str) -> Result<String> {
    Digest::from_hex(value)
        .map(|d| d.to_hex())
        .map_err(|e| Error::sidecar(format!("{what}: {e}")))
}

fn normalize_b64(value: &str, what: &str) -> Result<String> {
    let compact: String = value.chars().filter(|c| !c.is_ascii_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::sidecar(format!("{what} is empty")));
    }
    STANDARD
        .decode(&compact)
        .map_err(|e| Error::sidecar(format!("{what} is not Base64: {e}")))?;
    Ok(compact)
}

// ---------------------------------------------------------------------------
// Serialization

fn is_xml_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

fn escape_text(value: &str) -> String {
    let lead = value.len() - value.trim_start_matches(is_xml_space).len();
    let trail_start = value.trim_end_matches(is_xml_space).len().max(lead);
    let mut out = String::with_capacity(value.len() + 8);
    for (i, c) in value.char_indices() {
        let at_edge = i < lead || i >= trail_start;
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#xD;"),
            c if at_edge && is_xml_space(c) => out.push_str(&format!("&#x{:X};", c as u32)),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => {
                out.push_str(&format!("&#x{:X};", c as u32))
            }
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c if (c as u32) < 0x20 => out.push_str(&format!("&#x{:X};", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Renders the sidecar as UTF-8 XML. Deterministic: equal documents yield
/// byte-identical text.
pub fn serialize_sidecar(doc: &SidecarDocument) -> String {
    let m = &doc.metadata;
    let field = |f: MetadataField| escape_text(m.get(f));
    let remote_content = match &doc.chunks {
        Some(chunks) if !chunks.is_empty() => chunks
            .iter()
            .map(|c| {
                format!(
                    "  <remoteContent index=\"{}\" offset=\"{}\" length=\"{}\" signature=\"{}\">\n    <hash type=\"SHA-2\">{}</hash>\n  </remoteContent>\n",
                    c.index,
                    c.byte_offset,
                    c.byte_length,
                    escape_attr(&c.signature_b64),
                    escape_text(&c.digest_hex),
                )
            })
            .collect::<String>(),
        _ => "  <remoteContent>\n    <hash type=\"SHA-2\"></hash>\n  </remoteContent>\n".to_owned(),
    };
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<xmpmeta xmlns:x="adobe:xs:meta/" x:xmptk="Adobe XMP Core 5.6-c148 79.163820, 2019/02/20-18:54:02">
<RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#">
<NewsItemDescription rdf:about="">
<newsItem xml:lang="en-US">
<catalogRef href=""/>
<contentMeta>
<contentCreated> {date_time} </contentCreated>
<location>
  <city> {city} </city>
  <region> {region} </region>
  <country> {country} </country>
</location>
<creator role="crol:photographer">
  <name> {creator} </name>
</creator>
<creditline> </creditline>
<subject type="cpnat:abstract" qcode="medtop:20000717">
  <name xml:lang="en-GB"></name>
</subject>
<headline> {headline} </headline>
<description> {description} </description>
</contentMeta>
<contentSet>
{remote_content}</contentSet>
</newsItem>
<Signature>
  <SignedInfo>
    <DigestMethod Algorithm="http://www.w3.org/2001/04/xmldsig#sha256"/>
    <DigestValue> {digest} </DigestValue>
  </SignedInfo>
  <SignatureValue> {signature} </SignatureValue>
  <KeyInfo>
    <X509Data>
      <X509Certificate> {certificate} </X509Certificate>
    </X509Data>
  </KeyInfo>
</Signature>
</NewsItemDescription>
</RDF>
</xmpmeta>
"#,
        date_time = field(MetadataField::DateTime),
        city = field(MetadataField::City),
        region = field(MetadataField::Region),
        country = field(MetadataField::Country),
        creator = field(MetadataField::Creator),
        headline = field(MetadataField::Headline),
        description = field(MetadataField::Description),
        digest = escape_text(&doc.digest_hex),
        signature = escape_text(&doc.signature_b64),
        certificate = escape_text(&doc.certificate_b64),
    )
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Field(MetadataField),
    DigestValue,
    SignatureValue,
    Certificate,
    ChunkHash,
}

const TARGETS: &[(&[&str], Target)] = &[
    (
        &["contentMeta", "contentCreated"],
        Target::Field(MetadataField::DateTime),
    ),
    (
        &["contentMeta", "location", "city"],
        Target::Field(MetadataField::City),
    ),
    (
        &["contentMeta", "location", "region"],
        Target::Field(MetadataField::Region),
    ),
    (
        &["contentMeta", "location", "country"],
        Target::Field(MetadataField::Country),
    ),
    (
        &["contentMeta", "creator", "name"],
        Target::Field(MetadataField::Creator),
    ),
    (
        &["contentMeta", "headline"],
        Target::Field(MetadataField::Headline),
    ),
    (
        &["contentMeta", "description"],
        Target::Field(MetadataField::Description),
    ),
    (
        &["Signature", "SignedInfo", "DigestValue"],
        Target::DigestValue,
    ),
    (&["Signature", "SignatureValue"], Target::SignatureValue),
    (
        &["Signature", "KeyInfo", "X509Data", "X509Certificate"],
        Target::Certificate,
    ),
    (&["contentSet", "remoteContent", "hash"], Target::ChunkHash),
];

fn path_ends_with(stack: &[String], suffix: &[&str]) -> bool {
    stack.len() >= suffix.len()
        && stack[stack.len() - suffix.len()..]
            .iter()
            .zip(suffix)
            .all(|(a, b)| a == b)
}

fn local_name(start: &BytesStart<'_>) -> Result<String> {
    std::str::from_utf8(start.local_name().as_ref())
        .map(str::to_owned)
        .map_err(|e| Error::sidecar(e.to_string()))
}

#[derive(Default)]
struct PendingChunk {
    index: u64,
    byte_offset: u64,
    byte_length: u64,
    signature_b64: String,
    digest_hex: Option<String>,
}

fn read_chunk_attributes(start: &BytesStart<'_>) -> Result<Option<PendingChunk>> {
    let mut index = None;
    let mut offset = None;
    let mut length = None;
    let mut signature = None;
    for attr in start.attributes() {
        let attr = attr.map_err(|e| Error::sidecar(e.to_string()))?;
        let value = attr
            .unescape_value()
            .map_err(|e| Error::sidecar(e.to_string()))?;
        let number = |what: &str| {
            value.trim().parse::<u64>().map_err(|_| {
                Error::sidecar(format!(
                    "remoteContent {what} '{value}' is not a non-negative integer"
                ))
            })
        };
        match attr.key.local_name().as_ref() {
            b"index" => index = Some(number("index")?),
            b"offset" => offset = Some(number("offset")?),
            b"length" => length = Some(number("length")?),
            b"signature" => signature = Some(value.into_owned()),
            _ => {}
        }
    }
    let Some(index) = index else { return Ok(None) };
    let missing = |what: &str| Error::sidecar(format!("chunk {index} lacks the {what} attribute"));
    Ok(Some(PendingChunk {
        index,
        byte_offset: offset.ok_or_else(|| missing("offset"))?,
        byte_length: length.ok_or_else(|| missing("length"))?,
        signature_b64: signature.ok_or_else(|| missing("signature"))?,
        digest_hex: None,
    }))
}

fn finish_value(raw: &str) -> Result<String> {
    let trimmed = raw.trim_matches(is_xml_space);
    quick_xml::escape::unescape(trimmed)
        .map(|v| v.into_owned())
        .map_err(|e| Error::sidecar(format!("bad character reference: {e}")))
}

/// Parses sidecar text. Unknown elements are ignored; duplicated values are rejected.
pub fn parse_sidecar(text: &str) -> Result<SidecarDocument> {
    let mut reader = Reader::from_str(text);
    let config = reader.config_mut();
    config.trim_text(false);
    config.expand_empty_elements = true;
    config.check_end_names = true;

    let mut stack: Vec<String> = Vec::new();
    let mut saw_root = false;
    let mut saw_content_meta = false;
    let mut fields: [Option<String>; 7] = Default::default();
    let mut digest = None;
    let mut signature = None;
    let mut certificate = None;
    let mut chunks: Vec<ChunkEntry> = Vec::new();
    let mut pending_chunk: Option<PendingChunk> = None;
    // (target, depth at which text is collected, raw escaped text)
    let mut capture: Option<(Target, usize, String)> = None;

    loop {
        let event = reader.read_event().map_err(|e| {
            Error::sidecar(format!(
                "not well-formed XML at byte {}: {e}",
                reader.error_position()
            ))
        })?;
        match event {
            Event::Start(start) => {
                if stack.is_empty() && saw_root {
                    return Err(Error::sidecar("more than one root element"));
                }
                saw_root = true;
                stack.push(local_name(&start)?);
                if path_ends_with(&stack, &["contentMeta"]) {
                    saw_content_meta = true;
                }
                if path_ends_with(&stack, &["contentSet", "remoteContent"]) {
                    pending_chunk = read_chunk_attributes(&start)?;
                }
                if capture.is_none() {
                    if let Some((_, target)) = TARGETS
                        .iter()
                        .find(|(path, _)| path_ends_with(&stack, path))
                    {
                        capture = Some((*target, stack.len(), String::new()));
                    }
                }
            }
            Event::End(_) => {
                if let Some((target, depth, raw)) = capture.take() {
                    if depth == stack.len() {
                        let value = finish_value(&raw)?;
                        let slot = match target {
                            Target::Field(f) => &mut fields[f as usize],
                            Target::DigestValue => &mut digest,
                            Target::SignatureValue => &mut signature,
                            Target::Certificate => &mut certificate,
                            Target::ChunkHash => match pending_chunk.as_mut() {
                                Some(chunk) => &mut chunk.digest_hex,
                                None => &mut None,
                            },
                        };
                        if slot.is_some() {
                            return Err(Error::sidecar(format!(
                                "element '{}' appears more than once",
                                stack.last().map(String::as_str).unwrap_or_default()
                            )));
                        }
                        *slot = Some(value);
                    } else {
                        capture = Some((target, depth, raw));
                    }
                }
                if path_ends_with(&stack, &["contentSet", "remoteContent"]) {
                    if let Some(chunk) = pending_chunk.take() {
                        let digest_hex = chunk.digest_hex.ok_or_else(|| {
                            Error::sidecar(format!("chunk {} lacks a hash", chunk.index))
                        })?;
                        chunks.push(ChunkEntry {
                            index: chunk.index,
                            byte_offset: chunk.byte_offset,
                            byte_length: chunk.byte_length,
                            digest_hex,
                            signature_b64: chunk.signature_b64,
                        });
                    }
                }
                stack.pop();
            }
            Event::Text(text) => {
                if let Some((_, depth, raw)) = capture.as_mut() {
                    if *depth == stack.len() {
                        raw.push_str(
                            std::str::from_utf8(&text)
                                .map_err(|e| Error::sidecar(e.to_string()))?,
                        );
                    }
                } else if stack.is_empty() && !text.iter().all(|b| b.is_ascii_whitespace()) {
                    return Err(Error::sidecar("text outside the root element"));
                }
            }
            Event::CData(cdata) => {
                if let Some((_, depth, raw)) = capture.as_mut() {
                    if *depth == stack.len() {
                        let content = std::str::from_utf8(&cdata)
                            .map_err(|e| Error::sidecar(e.to_string()))?;
                        raw.push_str(&escape_text(content));
                    }
                }
            }
            Event::DocType(_) => {
                return Err(Error::sidecar("DOCTYPE declarations are not accepted"))
            }
            Event::Empty(_) => unreachable!("empty elements are expanded"),
            Event::Eof => break,
            Event::Decl(_) | Event::PI(_) | Event::Comment(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(Error::sidecar(format!(
            "document ends inside element '{}'",
            stack.join("/")
        )));
    }
    if !saw_root {
        return Err(Error::sidecar("document has no root element"));
    }
    if !saw_content_meta {
        return Err(Error::sidecar("contentMeta element is missing"));
    }

    let mut metadata = EndorsementMetadata::default();
    for field in MetadataField::ALL {
        let value = fields[field as usize]
            .take()
            .ok_or_else(|| Error::sidecar(format!("metadata field '{field}' is missing")))?;
        *metadata.get_mut(field) = value;
    }
    let mut doc = SidecarDocument {
        metadata,
        digest_hex: digest.ok_or_else(|| Error::sidecar("DigestValue is missing"))?,
        signature_b64: signature.ok_or_else(|| Error::sidecar("SignatureValue is missing"))?,
        certificate_b64: certificate.ok_or_else(|| Error::sidecar("X509Certificate is missing"))?,
        chunks: if chunks.is_empty() {
            None
        } else {
            Some(chunks)
        },
    };
    doc.validate()?;
    Ok(doc)
}
