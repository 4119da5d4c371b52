//! Dataset Nutrition Labels: the label document model, CSV profiling and
//! structural staleness, use-case scoped alert resolution, and static
//! reporting (per-label HTML and cross-label comparison).
//!
//! Every operation here is a pure function over immutable values, so the
//! crate is safe to use from any number of threads.

pub mod canonical;
pub mod label;
pub mod profiler;
pub mod reporting;
pub mod resolution;

pub use label::{
    parse_label, serialize_label, validate_label, Alert, Category, FlagKind, FlagRule, Fyi, Label,
    OverviewModule, ParseError, Prediction, QuestionnaireAnswer, Scope, SerializeError, Severity,
    UseCase, ValidationReport, Verdict, Violation, ViolationCode, ViolationLevel, SCHEMA_VERSION,
};
pub use profiler::{
    check_staleness, compute_fingerprint, fingerprint_csv, infer_column_type, profile_csv,
    profile_csv_at,
    ColumnBound, ColumnProfile, ColumnType, DatasetProfile, FingerprintError, ProfileError,
    StalenessError, StalenessReport, StalenessVerdict, StructuralFingerprint,
};
pub use reporting::{
    compare_labels, compare_labels_at, render_comparison_documents, render_comparison_html,
    render_label, render_label_html,
    CompareError, ComparisonEntry, ComparisonReport, ComparisonStatus, DocumentSet, RenderError,
};
pub use resolution::{
    list_use_cases, materialize_questionnaire_flags, resolve, resolve_all, ResolveError,
    ResolvedView, SeverityCounts, UseCaseListing,
};
