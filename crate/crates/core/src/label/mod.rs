//! The label document model.
//!
//! A [`Label`] carries three panes worth of content: overview modules, use
//! cases with their predictions and the alerts/FYIs scoped to them, and the
//! questionnaire answers grouped into five fixed categories. The on-disk
//! form is canonical JSON (`*.label.json`), read by [`parse_label`] and
//! written by [`serialize_label`].

mod parse;
pub mod question_bank;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::canonical;
use crate::profiler::{DatasetProfile, StructuralFingerprint};

pub use parse::{parse_label, ParseError};
pub(crate) use parse::{parse_iso_date, parse_profile_value};
pub use validate::{
    normalize_title, validate_label, ValidationReport, Verdict, Violation, ViolationCode,
    ViolationLevel,
};

/// The only schema version this crate reads and writes.
pub const SCHEMA_VERSION: &str = "1.0";

/// Prefix of ids given to alerts and FYIs materialized from questionnaire flags.
pub const MATERIALIZED_ID_PREFIX: &str = "q:";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Label {
    pub label_id: String,
    pub schema_version: String,
    pub dataset_name: String,
    pub publisher: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub license: Option<String>,
    pub date_produced: NaiveDate,
    /// Absent for datasets that are not tabular.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<StructuralFingerprint>,
    pub overview_modules: Vec<OverviewModule>,
    pub use_cases: Vec<UseCase>,
    pub alerts: Vec<Alert>,
    pub fyis: Vec<Fyi>,
    pub questionnaire: Vec<QuestionnaireAnswer>,
}

impl Label {
    pub fn use_case(&self, id: &str) -> Option<&UseCase> {
        self.use_cases.iter().find(|u| u.id == id)
    }

    /// The first embedded profile among the overview modules, if any.
    pub fn embedded_profile(&self) -> Option<&DatasetProfile> {
        self.overview_modules.iter().find_map(|m| match m {
            OverviewModule::ComputedStats { profile } => Some(profile),
            _ => None,
        })
    }

    /// Badge counts as they should read for this label.
    pub fn badge_counts(&self) -> (usize, usize, usize) {
        (self.use_cases.len(), self.alerts.len(), self.fyis.len())
    }
}

/// The business or research purpose a practitioner selects first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UseCase {
    pub id: String,
    pub title: String,
    pub description: String,
    pub predictions: Vec<Prediction>,
}

impl UseCase {
    pub fn prediction(&self, id: &str) -> Option<&Prediction> {
        self.predictions.iter().find(|p| p.id == id)
    }
}

/// The method or strategy used to address a use case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub id: String,
    pub title: String,
    pub method_description: String,
}

/// Three-point alert scale, keyed on whether a mitigation strategy is known.
///
/// Ordering ranks the most severe point highest:
/// `NoKnownMitigation > PartialMitigation > MitigationKnown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Severity {
    /// Red.
    #[serde(rename = "red")]
    NoKnownMitigation,
    /// Orange: a mitigation exists but is only partially effective or costly.
    #[serde(rename = "orange")]
    PartialMitigation,
    /// Yellow.
    #[serde(rename = "yellow")]
    MitigationKnown,
}

impl Severity {
    pub const ALL: [Severity; 3] = [
        Severity::NoKnownMitigation,
        Severity::PartialMitigation,
        Severity::MitigationKnown,
    ];

    fn rank(self) -> u8 {
        match self {
            Severity::NoKnownMitigation => 2,
            Severity::PartialMitigation => 1,
            Severity::MitigationKnown => 0,
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            Severity::NoKnownMitigation => "red",
            Severity::PartialMitigation => "orange",
            Severity::MitigationKnown => "yellow",
        }
    }

    pub fn from_color(s: &str) -> Option<Self> {
        match s {
            "red" => Some(Severity::NoKnownMitigation),
            "orange" => Some(Severity::PartialMitigation),
            "yellow" => Some(Severity::MitigationKnown),
            _ => None,
        }
    }

    pub fn requires_mitigation(self) -> bool {
        !matches!(self, Severity::NoKnownMitigation)
    }

    pub fn description(self) -> &'static str {
        match self {
            Severity::NoKnownMitigation => "No known mitigation",
            Severity::PartialMitigation => "Partial mitigation",
            Severity::MitigationKnown => "Mitigation known",
        }
    }
}

impl Ord for Severity {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Severity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.color())
    }
}

/// Which contexts an alert or FYI applies to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scope {
    Global,
    #[serde(rename = "use_case")]
    UseCaseWide { use_case: String },
    Pair { use_case: String, prediction: String },
}

impl Scope {
    pub fn matches(&self, use_case_id: &str, prediction_id: &str) -> bool {
        match self {
            Scope::Global => true,
            Scope::UseCaseWide { use_case } => use_case == use_case_id,
            Scope::Pair {
                use_case,
                prediction,
            } => use_case == use_case_id && prediction == prediction_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Alert {
    pub id: String,
    pub title: String,
    pub description: String,
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mitigation: Option<String>,
    pub scope: Vec<Scope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_from_question: Option<String>,
}

impl Alert {
    pub fn applies_to(&self, use_case_id: &str, prediction_id: &str) -> bool {
        self.scope.iter().any(|s| s.matches(use_case_id, prediction_id))
    }

    pub fn mitigation_text(&self) -> &str {
        self.mitigation.as_deref().unwrap_or("")
    }
}

/// Informational item, always shown green and never carrying a mitigation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fyi {
    pub id: String,
    pub title: String,
    pub description: String,
    pub scope: Vec<Scope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_from_question: Option<String>,
}

impl Fyi {
    pub const COLOR: &'static str = "green";

    pub fn applies_to(&self, use_case_id: &str, prediction_id: &str) -> bool {
        self.scope.iter().any(|s| s.matches(use_case_id, prediction_id))
    }
}

/// Dataset Info categories, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Category {
    Description,
    Composition,
    Provenance,
    Collection,
    Management,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Description,
        Category::Composition,
        Category::Provenance,
        Category::Collection,
        Category::Management,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Description => "Description",
            Category::Composition => "Composition",
            Category::Provenance => "Provenance",
            Category::Collection => "Collection",
            Category::Management => "Management",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Category::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuestionnaireAnswer {
    pub question_id: String,
    pub category: Category,
    pub question_text: String,
    /// Empty means unanswered.
    pub answer: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagRule>,
}

impl QuestionnaireAnswer {
    pub fn is_answered(&self) -> bool {
        !self.answer.trim().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    Alert,
    Fyi,
}

/// Turns an answered question into an alert or FYI.
///
/// `severity` and `mitigation` follow the same consistency rules as
/// [`Alert`]; a rule of kind `fyi` must carry neither.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlagRule {
    pub kind: FlagKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub severity: Option<Severity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mitigation: Option<String>,
    pub scope: Vec<Scope>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OverviewModule {
    KeyFacts {
        facts: BTreeMap<String, String>,
    },
    ComputedStats {
        profile: DatasetProfile,
    },
    Badges {
        use_case_count: u64,
        alert_count: u64,
        fyi_count: u64,
    },
    FreeText {
        title: String,
        text: String,
    },
}

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("label fails validation with {} error(s)", .0.error_count())]
    Invalid(ValidationReport),
    #[error("encoding failed: {0}")]
    Encoding(#[from] serde_json::Error),
}

/// Canonical bytes of a label. Labels with validation errors are rejected.
pub fn serialize_label(label: &Label) -> Result<Vec<u8>, SerializeError> {
    let report = validate_label(label);
    if !report.passed() {
        return Err(SerializeError::Invalid(report));
    }
    Ok(canonical::to_canonical_vec(label)?)
}

/// Canonical bytes without the validation gate, for diagnostics and tooling
/// that must write out labels known to be broken.
pub fn serialize_label_unchecked(label: &Label) -> Vec<u8> {
    canonical::to_canonical_vec(label).expect("label values always encode")
}
