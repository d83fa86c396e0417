use std::path::{Path, PathBuf};
use thiserror::Error;

/// One labelled dataset sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path resolved against the manifest's directory.
    pub path: PathBuf,
    /// The path exactly as written in the manifest.
    pub source: String,
    pub label: String,
}

/// An ordered, labelled list of input files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest header must be exactly `path,label`")]
    MissingHeader,
    #[error("line {line}: expected 2 fields, found {found}")]
    FieldCount { line: u64, found: usize },
    #[error("line {line}: empty {field}")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("empty manifest")]
    Empty,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices of the other entries sharing entry `i`'s label.
    pub fn same_class_partners(&self, i: usize) -> Vec<usize> {
        let label = &self.entries[i].label;
        self.entries
            .iter()
            .enumerate()
            .filter(|(j, e)| *j != i && &e.label == label)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Parses manifest text. Relative paths are joined onto `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<DatasetManifest, ManifestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(_)) | None => return Err(ManifestError::MissingHeader),
    };
    if header.len() != 2 || &header[0] != "path" || &header[1] != "label" {
        return Err(ManifestError::MissingHeader);
    }
    let mut entries = Vec::new();
    for record in records {
        let record = record.map_err(|e| ManifestError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(ManifestError::FieldCount {
                line,
                found: record.len(),
            });
        }
        let (source, label) = (&record[0], &record[1]);
        if source.is_empty() {
            return Err(ManifestError::EmptyField { line, field: "path" });
        }
        if label.is_empty() {
            return Err(ManifestError::EmptyField { line, field: "label" });
        }
        let raw = Path::new(source);
        let path = if raw.is_absolute() {
            raw.to_owned()
        } else {
            base_dir.join(raw)
        };
        entries.push(ManifestEntry {
            path,
            source: source.to_owned(),
            label: label.to_owned(),
        });
    }
    if entries.is_empty() {
        return Err(ManifestError::Empty);
    }
    Ok(DatasetManifest { entries })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, ManifestError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ManifestError::Read {
        path: path.to_owned(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| ManifestError::Malformed {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(&text, base)
}
