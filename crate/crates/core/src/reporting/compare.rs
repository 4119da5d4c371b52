use std::collections::HashSet;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::label::{normalize_title, Label};
use crate::profiler::format_timestamp;
use crate::resolution::{resolve, ResolveError, SeverityCounts};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ComparisonStatus {
    Matched { use_case_id: String },
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonEntry {
    pub label_id: String,
    pub dataset_name: String,
    pub status: ComparisonStatus,
    /// Distinct alerts over all predictions of the matched use case.
    pub severity_counts: SeverityCounts,
    pub fyi_count: u64,
    pub date_produced: NaiveDate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_count: Option<u64>,
}

impl ComparisonEntry {
    pub fn is_matched(&self) -> bool {
        matches!(self.status, ComparisonStatus::Matched { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    /// Normalized form of the queried title.
    pub use_case_title: String,
    pub entries: Vec<ComparisonEntry>,
    #[serde(serialize_with = "serialize_timestamp")]
    pub generated_at: DateTime<Utc>,
}

fn serialize_timestamp<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(ts))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("comparison needs at least two labels")]
    FewerThanTwoLabels,
    #[error("use case title is empty")]
    EmptyTitle,
    #[error("no label has a use case titled {0:?}")]
    NoLabelMatches(String),
    #[error("label {label_id}: {source}")]
    Resolve {
        label_id: String,
        #[source]
        source: ResolveError,
    },
}

impl CompareError {
    pub fn code(&self) -> &'static str {
        match self {
            CompareError::FewerThanTwoLabels => "FEWER_THAN_TWO_LABELS",
            CompareError::EmptyTitle => "EMPTY_TITLE",
            CompareError::NoLabelMatches(_) => "NO_LABEL_MATCHES",
            CompareError::Resolve { .. } => "RESOLVE_FAILED",
        }
    }
}

pub fn compare_labels(labels: &[Label], use_case_title: &str) -> Result<ComparisonReport, CompareError> {
    compare_labels_at(labels, use_case_title, Utc::now())
}

/// Lines up several labels' alert profiles for one use case, matched across
/// labels by normalized title. Counts for a matched label are taken over
/// the union of its predictions, each alert id counted once.
pub fn compare_labels_at(
    labels: &[Label],
    use_case_title: &str,
    generated_at: DateTime<Utc>,
) -> Result<ComparisonReport, CompareError> {
    if labels.len() < 2 {
        return Err(CompareError::FewerThanTwoLabels);
    }
    let wanted = normalize_title(use_case_title);
    if wanted.is_empty() {
        return Err(CompareError::EmptyTitle);
    }

    let entries = labels
        .iter()
        .map(|label| compare_one(label, &wanted))
        .collect::<Result<Vec<_>, _>>()?;
    if !entries.iter().any(ComparisonEntry::is_matched) {
        return Err(CompareError::NoLabelMatches(wanted));
    }
    Ok(ComparisonReport {
        use_case_title: wanted,
        entries,
        generated_at,
    })
}

fn compare_one(label: &Label, wanted: &str) -> Result<ComparisonEntry, CompareError> {
    let mut entry = ComparisonEntry {
        label_id: label.label_id.clone(),
        dataset_name: label.dataset_name.clone(),
        status: ComparisonStatus::NotApplicable,
        severity_counts: SeverityCounts::default(),
        fyi_count: 0,
        date_produced: label.date_produced,
        row_count: label.embedded_profile().map(|p| p.row_count),
    };
    let Some(use_case) = label
        .use_cases
        .iter()
        .find(|u| normalize_title(&u.title) == wanted)
    else {
        return Ok(entry);
    };

    let mut alerts_seen = HashSet::new();
    let mut fyis_seen = HashSet::new();
    for p in &use_case.predictions {
        let view = resolve(label, &use_case.id, &p.id).map_err(|source| CompareError::Resolve {
            label_id: label.label_id.clone(),
            source,
        })?;
        for a in view.alerts {
            if alerts_seen.insert(a.id) {
                entry.severity_counts.add(a.severity);
            }
        }
        for f in view.fyis {
            if fyis_seen.insert(f.id) {
                entry.fyi_count += 1;
            }
        }
    }
    entry.status = ComparisonStatus::Matched {
        use_case_id: use_case.id.clone(),
    };
    Ok(entry)
}
