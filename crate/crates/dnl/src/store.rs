//! Directory-backed label store.
//!
//! Each label lives in its own `*.label.json` file holding its canonical
//! bytes. The in-memory index is an immutable map behind an `Arc`; writers
//! build a new map and swap it in, so a reader always sees either the old
//! or the new index in full.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use dnl_core::canonical::sha256_hex;
use dnl_core::label::{parse_label, serialize_label, validate_label, Label, ParseError, ValidationReport};
use parking_lot::{Mutex, RwLock};
use serde::Serialize;
use thiserror::Error;
use tracing::{info, warn};

pub const LABEL_SUFFIX: &str = ".label.json";

#[derive(Debug)]
pub struct StoredLabel {
    pub label: Label,
    /// Exactly the bytes on disk.
    pub canonical: Vec<u8>,
    pub path: PathBuf,
}

pub type Index = BTreeMap<String, Arc<StoredLabel>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelSummary {
    pub label_id: String,
    pub dataset_name: String,
    pub publisher: String,
    pub date_produced: NaiveDate,
    pub use_case_count: usize,
    pub alert_count: usize,
    pub fyi_count: usize,
}

impl LabelSummary {
    fn of(label: &Label) -> Self {
        LabelSummary {
            label_id: label.label_id.clone(),
            dataset_name: label.dataset_name.clone(),
            publisher: label.publisher.clone(),
            date_produced: label.date_produced,
            use_case_count: label.use_cases.len(),
            alert_count: label.alerts.len(),
            fyi_count: label.fyis.len(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store directory {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum SubmitError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("label fails validation")]
    Invalid(ValidationReport),
    #[error("label id {0:?} already exists")]
    DuplicateId(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// A file that was not indexed while loading the store.
#[derive(Debug, Clone)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

pub struct LabelStore {
    dir: PathBuf,
    index: RwLock<Arc<Index>>,
    writer: Mutex<()>,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// File name for a label id. Ids that are not plain file names are hashed.
pub fn file_name_for(label_id: &str) -> String {
    let plain = !label_id.is_empty()
        && !label_id.starts_with('.')
        && label_id.len() <= 128
        && label_id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'));
    if plain {
        format!("{label_id}{LABEL_SUFFIX}")
    } else {
        format!("id-{}{LABEL_SUFFIX}", &sha256_hex(label_id.as_bytes())[..32])
    }
}

fn load_one(path: &Path) -> Result<StoredLabel, String> {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    let label = parse_label(&bytes).map_err(|e| e.to_string())?;
    let canonical = serialize_label(&label).map_err(|e| match e {
        dnl_core::SerializeError::Invalid(report) => format!(
            "fails validation: {}",
            report
                .violations
                .iter()
                .filter(|v| v.level == dnl_core::ViolationLevel::Error)
                .map(|v| format!("{} at {}", v.code, v.path))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        other => other.to_string(),
    })?;
    Ok(StoredLabel {
        label,
        canonical,
        path: path.to_path_buf(),
    })
}

fn load_index(dir: &Path) -> Result<(Index, Vec<Skipped>), StoreError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(LABEL_SUFFIX))
        })
        .collect();
    paths.sort();

    let mut index = Index::new();
    let mut skipped = Vec::new();
    for path in paths {
        match load_one(&path) {
            Ok(stored) => {
                let id = stored.label.label_id.clone();
                if let Some(existing) = index.get(&id) {
                    skipped.push(Skipped {
                        reason: format!(
                            "label id {id:?} already loaded from {}",
                            existing.path.display()
                        ),
                        path,
                    });
                } else {
                    index.insert(id, Arc::new(stored));
                }
            }
            Err(reason) => skipped.push(Skipped { path, reason }),
        }
    }
    Ok((index, skipped))
}

impl LabelStore {
    /// Opens (creating if needed) a store directory and indexes every valid
    /// label in it. Invalid files are logged and left out.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let (index, skipped) = load_index(&dir)?;
        for s in &skipped {
            warn!(path = %s.path.display(), reason = %s.reason, "skipping label file");
        }
        info!(dir = %dir.display(), labels = index.len(), "label store opened");
        Ok(LabelStore {
            dir,
            index: RwLock::new(Arc::new(index)),
            writer: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The current index. Later writes do not affect a snapshot.
    pub fn snapshot(&self) -> Arc<Index> {
        Arc::clone(&self.index.read())
    }

    pub fn get(&self, label_id: &str) -> Option<Arc<StoredLabel>> {
        self.snapshot().get(label_id).cloned()
    }

    pub fn len(&self) -> usize {
        self.snapshot().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Summaries ordered by label id.
    pub fn list(&self) -> Vec<LabelSummary> {
        self.snapshot()
            .values()
            .map(|s| LabelSummary::of(&s.label))
            .collect()
    }

    /// Re-reads the directory and swaps in the new index in one step.
    pub fn reload(&self) -> Result<Vec<Skipped>, StoreError> {
        let _guard = self.writer.lock();
        let (index, skipped) = load_index(&self.dir)?;
        *self.index.write() = Arc::new(index);
        Ok(skipped)
    }

    /// Parses, validates and persists a label document. The file holds the
    /// canonical bytes, not the submitted ones.
    pub fn submit(&self, body: &[u8]) -> Result<String, SubmitError> {
        let label = parse_label(body)?;
        let report = validate_label(&label);
        if !report.passed() {
            return Err(SubmitError::Invalid(report));
        }
        let canonical = serialize_label(&label).map_err(|e| match e {
            dnl_core::SerializeError::Invalid(r) => SubmitError::Invalid(r),
            dnl_core::SerializeError::Encoding(e) => {
                unreachable!("label encoding cannot fail: {e}")
            }
        })?;
        let id = label.label_id.clone();

        let _guard = self.writer.lock();
        let current = self.snapshot();
        let path = self.dir.join(file_name_for(&id));
        if current.contains_key(&id) || path.exists() {
            return Err(SubmitError::DuplicateId(id));
        }
        write_atomically(&self.dir, &path, &canonical)?;

        let mut next = (*current).clone();
        next.insert(
            id.clone(),
            Arc::new(StoredLabel {
                label,
                canonical,
                path,
            }),
        );
        *self.index.write() = Arc::new(next);
        info!(label_id = %id, "label stored");
        Ok(id)
    }
}

fn write_atomically(dir: &Path, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        path.file_name().and_then(|n| n.to_str()).unwrap_or("label")
    ));
    let write = || -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|source| {
        let _ = fs::remove_file(&tmp);
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(file_name_for("covid-2020"), "covid-2020.label.json");
        let hashed = file_name_for("../etc/passwd");
        assert!(hashed.starts_with("id-") && !hashed.contains('/'), "{hashed}");
        assert!(file_name_for(".hidden").starts_with("id-"));
        assert_ne!(file_name_for("a b"), file_name_for("a_b"));
    }
}
