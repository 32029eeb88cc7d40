//! Descriptive fields an endorser attests to, and the media they describe.

use std::fmt;

/// The seven descriptive fields that travel with an endorsed asset.
///
/// Values are stored verbatim. No trimming or format validation is applied,
/// so whatever the endorser typed is exactly what gets hashed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EndorsementMetadata {
    pub date_time: String,
    pub city: String,
    pub region: String,
    pub country: String,
    pub creator: String,
    pub headline: String,
    pub description: String,
}

/// Identifies one of the seven metadata fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetadataField {
    DateTime,
    City,
    Region,
    Country,
    Creator,
    Headline,
    Description,
}

impl MetadataField {
    /// All fields in serialization order.
    pub const ALL: [MetadataField; 7] = [
        MetadataField::DateTime,
        MetadataField::City,
        MetadataField::Region,
        MetadataField::Country,
        MetadataField::Creator,
        MetadataField::Headline,
        MetadataField::Description,
    ];

    /// camelCase name used in JSON reports and metadata input files.
    pub fn key(self) -> &'static str {
        match self {
            MetadataField::DateTime => "dateTime",
            MetadataField::City => "city",
            MetadataField::Region => "region",
            MetadataField::Country => "country",
            MetadataField::Creator => "creator",
            MetadataField::Headline => "headline",
            MetadataField::Description => "description",
        }
    }

    /// Human-readable label, used by interactive prompts.
    pub fn label(self) -> &'static str {
        match self {
            MetadataField::DateTime => "Date and time",
            MetadataField::City => "City",
            MetadataField::Region => "Region",
            MetadataField::Country => "Country",
            MetadataField::Creator => "Creator (photographer)",
            MetadataField::Headline => "Headline",
            MetadataField::Description => "Description",
        }
    }
}

impl fmt::Display for MetadataField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl EndorsementMetadata {
    pub fn get(&self, field: MetadataField) -> &str {
        match field {
            MetadataField::DateTime => &self.date_time,
            MetadataField::City => &self.city,
            MetadataField::Region => &self.region,
            MetadataField::Country => &self.country,
            MetadataField::Creator => &self.creator,
            MetadataField::Headline => &self.headline,
            MetadataField::Description => &self.description,
        }
    }

    pub fn get_mut(&mut self, field: MetadataField) -> &mut String {
        match field {
            MetadataField::DateTime => &mut self.date_time,
            MetadataField::City => &mut self.city,
            MetadataField::Region => &mut self.region,
            MetadataField::Country => &mut self.country,
            MetadataField::Creator => &mut self.creator,
            MetadataField::Headline => &mut self.headline,
            MetadataField::Description => &mut self.description,
        }
    }

    /// Signing refuses values containing LF. The preimage terminates each
    /// field with LF, so an embedded LF would let text move between adjacent
    /// fields without changing the signed bytes.
    pub fn check_signable(&self) -> crate::Result<()> {
        match MetadataField::ALL
            .into_iter()
            .find(|f| self.get(*f).contains('\n'))
        {
            Some(field) => Err(crate::Error::InvalidMetadata(format!(
                "field '{field}' contains a line feed"
            ))),
            None => Ok(()),
        }
    }

    /// Field values in serialization order.
    pub fn values(&self) -> [&str; 7] {
        MetadataField::ALL.map(|f| self.get(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MediaKind {
    Image,
    Video,
    Other,
}

impl MediaKind {
    /// Guesses the kind from a file name or URL path extension.
    pub fn from_locator(locator: &str) -> Self {
        let path = locator.split(['?', '#']).next().unwrap_or_default();
        let ext = match path.rsplit_once('.') {
            Some((_, ext)) if !ext.contains('/') => ext.to_ascii_lowercase(),
            _ => return MediaKind::Other,
        };
        match ext.as_str() {
            "jpg" | "jpeg" | "png" | "gif" | "webp" | "bmp" | "tif" | "tiff" | "svg" | "avif"
            | "heic" => MediaKind::Image,
            "mp4" | "m4v" | "webm" | "mov" | "mkv" | "avi" | "ogv" | "ts" => MediaKind::Video,
            _ => MediaKind::Other,
        }
    }
}

/// Raw media bytes plus where they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaAsset {
    pub bytes: Vec<u8>,
    pub kind: MediaKind,
    pub locator: String,
}

impl MediaAsset {
    pub fn new(bytes: Vec<u8>, locator: impl Into<String>) -> Self {
        let locator = locator.into();
        MediaAsset {
            kind: MediaKind::from_locator(&locator),
            bytes,
            locator,
        }
    }

    pub fn with_kind(bytes: Vec<u8>, kind: MediaKind, locator: impl Into<String>) -> Self {
        MediaAsset {
            bytes,
            kind,
            locator: locator.into(),
        }
    }
}
