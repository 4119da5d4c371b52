//! Static output: a three-pane HTML rendering of one label, and the
//! cross-label comparison for a use case with its HTML table.
//!
//! Rendering is byte-deterministic for fixed inputs and pulls in no scripts.

mod compare;
pub mod html;

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::label::{validate_label, Label, ValidationReport};
use crate::resolution::{resolve_all, ResolvedView};

pub use compare::{
    compare_labels, compare_labels_at, CompareError, ComparisonEntry, ComparisonReport,
    ComparisonStatus,
};

/// Relative path -> UTF-8 contents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentSet {
    files: BTreeMap<String, String>,
}

impl DocumentSet {
    pub fn insert(&mut self, path: impl Into<String>, contents: String) {
        self.files.insert(path.into(), contents);
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.files.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Writes every document below `dir`, creating subdirectories.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        for (rel, contents) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, contents)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("label fails validation with {} error(s)", .0.error_count())]
    InvalidLabel(ValidationReport),
    #[error("no resolved view supplied for use case {use_case_id:?} / prediction {prediction_id:?}")]
    MissingView {
        use_case_id: String,
        prediction_id: String,
    },
}

/// Renders `index.html`, the three pane pages, and the stylesheet from a
/// label and its resolved views (one per use case/prediction pair).
pub fn render_label_html(
    label: &Label,
    resolved_views: &[ResolvedView],
) -> Result<DocumentSet, RenderError> {
    let report = validate_label(label);
    if !report.passed() {
        return Err(RenderError::InvalidLabel(report));
    }
    html::render(label, resolved_views)
}

/// [`render_label_html`] with the views resolved here.
pub fn render_label(label: &Label) -> Result<DocumentSet, RenderError> {
    let report = validate_label(label);
    if !report.passed() {
        return Err(RenderError::InvalidLabel(report));
    }
    // a validated label resolves for every pair it declares
    let views = resolve_all(label).expect("validated labels resolve");
    html::render(label, &views)
}

/// `comparison.html`: one column per label, one row per severity.
pub fn render_comparison_html(report: &ComparisonReport) -> String {
    html::render_comparison(report)
}

/// The comparison page together with the stylesheet it links.
pub fn render_comparison_documents(report: &ComparisonReport) -> DocumentSet {
    let mut docs = DocumentSet::default();
    docs.insert("comparison.html", render_comparison_html(report));
    docs.insert(html::STYLESHEET_PATH, html::STYLESHEET.to_string());
    docs
}
