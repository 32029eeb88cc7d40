//! Collecting the seven metadata fields from flags, environment and prompts.

use std::io::{self, BufRead, Write};
use std::path::Path;

use newscert_core::{EndorsementMetadata, MetadataField};
use serde_json::{Map, Value};

use crate::error::{SignError, SignResult};

/// Partially supplied metadata; `None` means "not given", `Some("")` is a
/// deliberate empty value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataInput {
    values: [Option<String>; 7],
}

impl MetadataInput {
    pub fn get(&self, field: MetadataField) -> Option<&str> {
        self.values[position(field)].as_deref()
    }

    pub fn set(&mut self, field: MetadataField, value: impl Into<String>) {
        self.values[position(field)] = Some(value.into());
    }

    pub fn with(mut self, field: MetadataField, value: impl Into<String>) -> Self {
        self.set(field, value);
        self
    }

    pub fn missing(&self) -> Vec<MetadataField> {
        MetadataField::ALL
            .into_iter()
            .filter(|f| self.get(*f).is_none())
            .collect()
    }

    /// Fills fields not present in `self` from `other`.
    pub fn or(mut self, other: &MetadataInput) -> Self {
        for (mine, theirs) in self.values.iter_mut().zip(&other.values) {
            if mine.is_none() {
                mine.clone_from(theirs);
            }
        }
        self
    }

    pub fn complete(&self) -> Option<EndorsementMetadata> {
        let mut meta = EndorsementMetadata::default();
        for field in MetadataField::ALL {
            *meta.get_mut(field) = self.get(field)?.to_owned();
        }
        Some(meta)
    }

    /// Reads `NEWSCERT_<FIELD>` variables through `lookup`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Self {
        let mut input = MetadataInput::default();
        for field in MetadataField::ALL {
            if let Some(v) = lookup(&env_var_name(field)) {
                input.set(field, v);
            }
        }
        input
    }
}

impl From<&EndorsementMetadata> for MetadataInput {
    fn from(meta: &EndorsementMetadata) -> Self {
        let mut input = MetadataInput::default();
        for field in MetadataField::ALL {
            input.set(field, meta.get(field));
        }
        input
    }
}

fn position(field: MetadataField) -> usize {
    MetadataField::ALL.iter().position(|f| *f == field).unwrap()
}

/// `NEWSCERT_DATE_TIME`, `NEWSCERT_CITY`, ...
pub fn env_var_name(field: MetadataField) -> String {
    let mut name = String::from("NEWSCERT_");
    for c in field.key().chars() {
        if c.is_ascii_uppercase() {
            name.push('_');
        }
        name.push(c.to_ascii_uppercase());
    }
    name
}

/// Asks for one field at a time.
pub trait Prompter {
    fn ask(&mut self, field: MetadataField) -> io::Result<String>;
}

/// Prompts on a writer and reads one line per field.
pub struct LinePrompter<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> LinePrompter<R, W> {
    pub fn new(input: R, output: W) -> Self {
        LinePrompter { input, output }
    }
}

impl<R: BufRead, W: Write> Prompter for LinePrompter<R, W> {
    fn ask(&mut self, field: MetadataField) -> io::Result<String> {
        write!(self.output, "Enter {}: ", field.label())?;
        self.output.flush()?;
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            return Err(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                format!("no value for {}", field.key()),
            ));
        }
        let trimmed = line.strip_suffix('\n').unwrap_or(&line);
        Ok(trimmed.strip_suffix('\r').unwrap_or(trimmed).to_owned())
    }
}

/// Flags win over environment, environment over prompts. Prompts run only for
/// fields still missing, in canonical field order, and only if a prompter is
/// supplied.
pub fn resolve_metadata(
    flags: &MetadataInput,
    env: &MetadataInput,
    prompter: Option<&mut dyn Prompter>,
) -> SignResult<EndorsementMetadata> {
    let mut merged = flags.clone().or(env);
    let missing = merged.missing();
    if !missing.is_empty() {
        let Some(prompter) = prompter else {
            let names: Vec<_> = missing.iter().map(|f| f.key()).collect();
            return Err(SignError::InvalidMetadata(format!(
                "missing fields: {}",
                names.join(", ")
            )));
        };
        for field in missing {
            let value = prompter
                .ask(field)
                .map_err(|e| SignError::InvalidMetadata(format!("reading {}: {e}", field.key())))?;
            merged.set(field, value);
        }
    }
    Ok(merged.complete().expect("all fields filled"))
}

/// Loads a JSON object keyed by `dateTime`, `city`, ... Every field must be
/// present as a string.
pub fn read_metadata_json(path: &Path) -> SignResult<EndorsementMetadata> {
    let text = std::fs::read_to_string(path).map_err(|e| SignError::io(path, e))?;
    let bad = |msg: String| SignError::InvalidMetadata(format!("{}: {msg}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| bad("expected a JSON object".into()))?;
    let mut meta = EndorsementMetadata::default();
    for field in MetadataField::ALL {
        *meta.get_mut(field) = match obj.get(field.key()) {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(bad(format!("'{}' must be a string", field.key()))),
            None => return Err(bad(format!("missing '{}'", field.key()))),
        };
    }
    Ok(meta)
}

pub fn write_metadata_json(path: &Path, meta: &EndorsementMetadata) -> SignResult<()> {
    let obj: Map<String, Value> = MetadataField::ALL
        .into_iter()
        .map(|f| (f.key().to_owned(), Value::String(meta.get(f).to_owned())))
        .collect();
    let mut text =
        serde_json::to_string_pretty(&Value::Object(obj)).expect("string map serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| SignError::io(path, e))
}
