use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{
    Alert, FlagKind, Label, OverviewModule, Scope, Severity, MATERIALIZED_ID_PREFIX,
    SCHEMA_VERSION,
};
use crate::profiler::compute_fingerprint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationLevel {
    Error,
    Warning,
}

/// Stable machine codes for every semantic rule a label can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    EmptyLabelId,
    UnsupportedSchemaVersion,
    EmptyDatasetName,
    EmptyId,
    EmptyTitle,
    DuplicateUseCaseId,
    DuplicatePredictionId,
    DuplicateAlertId,
    DuplicateFyiId,
    DuplicateQuestionId,
    DuplicateUseCaseTitle,
    NoPredictions,
    ReservedIdPrefix,
    EmptyScope,
    DanglingUseCase,
    DanglingPrediction,
    PredictionUseCaseMismatch,
    DanglingQuestion,
    MitigationRequired,
    MitigationForbidden,
    FlagSeverityMissing,
    FyiHasSeverity,
    FyiHasMitigation,
    FingerprintEmpty,
    FingerprintMismatch,
    BadgeCountMismatch,
    ProfileFingerprintMismatch,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            EmptyLabelId => "EMPTY_LABEL_ID",
            UnsupportedSchemaVersion => "UNSUPPORTED_SCHEMA_VERSION",
            EmptyDatasetName => "EMPTY_DATASET_NAME",
            EmptyId => "EMPTY_ID",
            EmptyTitle => "EMPTY_TITLE",
            DuplicateUseCaseId => "DUPLICATE_USE_CASE_ID",
            DuplicatePredictionId => "DUPLICATE_PREDICTION_ID",
            DuplicateAlertId => "DUPLICATE_ALERT_ID",
            DuplicateFyiId => "DUPLICATE_FYI_ID",
            DuplicateQuestionId => "DUPLICATE_QUESTION_ID",
            DuplicateUseCaseTitle => "DUPLICATE_USE_CASE_TITLE",
            NoPredictions => "NO_PREDICTIONS",
            ReservedIdPrefix => "RESERVED_ID_PREFIX",
            EmptyScope => "EMPTY_SCOPE",
            DanglingUseCase => "DANGLING_USE_CASE",
            DanglingPrediction => "DANGLING_PREDICTION",
            PredictionUseCaseMismatch => "PREDICTION_USE_CASE_MISMATCH",
            DanglingQuestion => "DANGLING_QUESTION",
            MitigationRequired => "MITIGATION_REQUIRED",
            MitigationForbidden => "MITIGATION_FORBIDDEN",
            FlagSeverityMissing => "FLAG_SEVERITY_MISSING",
            FyiHasSeverity => "FYI_HAS_SEVERITY",
            FyiHasMitigation => "FYI_HAS_MITIGATION",
            FingerprintEmpty => "FINGERPRINT_EMPTY",
            FingerprintMismatch => "FINGERPRINT_MISMATCH",
            BadgeCountMismatch => "BADGE_COUNT_MISMATCH",
            ProfileFingerprintMismatch => "PROFILE_FINGERPRINT_MISMATCH",
        }
    }

    pub fn level(self) -> ViolationLevel {
        use ViolationCode::*;
        match self {
            EmptyDatasetName | BadgeCountMismatch | ProfileFingerprintMismatch => {
                ViolationLevel::Warning
            }
            _ => ViolationLevel::Error,
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ViolationCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub level: ViolationLevel,
    /// JSON pointer to the offending node.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn verdict(&self) -> Verdict {
        if self.error_count() == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn error_count(&self) -> usize {
        self.violations
            .iter()
            .filter(|v| v.level == ViolationLevel::Error)
            .count()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl Serialize for ValidationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            verdict: Verdict,
            violations: &'a [Violation],
        }
        Wire {
            verdict: self.verdict(),
            violations: &self.violations,
        }
        .serialize(s)
    }
}

/// Lowercase, trim, and collapse runs of inner whitespace to one space.
pub fn normalize_title(title: &str) -> String {
    title
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

struct Collector {
    node: usize,
    found: Vec<(usize, Violation)>,
}

impl Collector {
    fn enter(&mut self) {
        self.node += 1;
    }

    fn push(&mut self, code: ViolationCode, path: impl Into<String>, message: impl Into<String>) {
        self.found.push((
            self.node,
            Violation {
                code,
                level: code.level(),
                path: path.into(),
                message: message.into(),
            },
        ));
    }

    fn finish(mut self) -> ValidationReport {
        // document order first, then code within one node
        self.found
            .sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.code.as_str().cmp(b.1.code.as_str())));
        ValidationReport {
            violations: self.found.into_iter().map(|(_, v)| v).collect(),
        }
    }
}

/// Checks every semantic rule of the label model. Never fails; problems
/// are returned as data in document order.
pub fn validate_label(label: &Label) -> ValidationReport {
    use ViolationCode::*;

    let mut c = Collector {
        node: 0,
        found: Vec::new(),
    };

    c.enter();
    if label.label_id.trim().is_empty() {
        c.push(EmptyLabelId, "/label_id", "label_id must not be empty");
    }
    c.enter();
    if label.schema_version != SCHEMA_VERSION {
        c.push(
            UnsupportedSchemaVersion,
            "/schema_version",
            format!(
                "schema_version {:?} is not supported (expected {SCHEMA_VERSION:?})",
                label.schema_version
            ),
        );
    }
    c.enter();
    if label.dataset_name.trim().is_empty() {
        c.push(EmptyDatasetName, "/dataset_name", "dataset_name is empty");
    }

    c.enter();
    if let Some(fp) = &label.fingerprint {
        match compute_fingerprint(&fp.column_names) {
            Err(_) => c.push(
                FingerprintEmpty,
                "/fingerprint/column_names",
                "fingerprint has no columns",
            ),
            Ok(expected) if expected.digest != fp.digest => c.push(
                FingerprintMismatch,
                "/fingerprint/digest",
                format!(
                    "digest {} does not match column names (expected {})",
                    fp.digest, expected.digest
                ),
            ),
            Ok(_) => {}
        }
    }

    let (uc_count, alert_count, fyi_count) = label.badge_counts();
    for (i, module) in label.overview_modules.iter().enumerate() {
        c.enter();
        let path = format!("/overview_modules/{i}");
        match module {
            OverviewModule::Badges {
                use_case_count,
                alert_count: a,
                fyi_count: f,
            } => {
                let stated = (*use_case_count, *a, *f);
                let actual = (uc_count as u64, alert_count as u64, fyi_count as u64);
                if stated != actual {
                    c.push(
                        BadgeCountMismatch,
                        path,
                        format!(
                            "badges read {}/{}/{} use cases/alerts/FYIs but the label has {}/{}/{}",
                            stated.0, stated.1, stated.2, actual.0, actual.1, actual.2
                        ),
                    );
                }
            }
            OverviewModule::ComputedStats { profile } => {
                if let Some(fp) = &label.fingerprint {
                    if fp.digest != profile.fingerprint.digest {
                        c.push(
                            ProfileFingerprintMismatch,
                            format!("{path}/profile/fingerprint"),
                            "embedded profile was computed over a different column structure",
                        );
                    }
                }
            }
            OverviewModule::KeyFacts { .. } | OverviewModule::FreeText { .. } => {}
        }
    }

    // use case id -> its prediction ids; prediction id -> owning use case
    let mut use_case_ids: HashMap<&str, HashSet<&str>> = HashMap::new();
    let mut prediction_owner: HashMap<&str, &str> = HashMap::new();
    let mut titles: HashSet<String> = HashSet::new();
    for (i, uc) in label.use_cases.iter().enumerate() {
        c.enter();
        let path = format!("/use_cases/{i}");
        if uc.id.is_empty() {
            c.push(EmptyId, format!("{path}/id"), "use case id is empty");
        } else if use_case_ids.contains_key(uc.id.as_str()) {
            c.push(
                DuplicateUseCaseId,
                format!("{path}/id"),
                format!("use case id {:?} is declared more than once", uc.id),
            );
        }
        let norm = normalize_title(&uc.title);
        if norm.is_empty() {
            c.push(EmptyTitle, format!("{path}/title"), "use case title is empty");
        } else if !titles.insert(norm.clone()) {
            c.push(
                DuplicateUseCaseTitle,
                format!("{path}/title"),
                format!("use case title {norm:?} is not unique after normalization"),
            );
        }
        if uc.predictions.is_empty() {
            c.push(
                NoPredictions,
                format!("{path}/predictions"),
                format!("use case {:?} has no predictions", uc.id),
            );
        }
        let owned = use_case_ids.entry(uc.id.as_str()).or_default();
        for (j, p) in uc.predictions.iter().enumerate() {
            c.enter();
            let ppath = format!("{path}/predictions/{j}");
            if p.id.is_empty() {
                c.push(EmptyId, format!("{ppath}/id"), "prediction id is empty");
            } else if prediction_owner.contains_key(p.id.as_str()) {
                c.push(
                    DuplicatePredictionId,
                    format!("{ppath}/id"),
                    format!("prediction id {:?} is declared more than once", p.id),
                );
            } else {
                prediction_owner.insert(p.id.as_str(), uc.id.as_str());
            }
            owned.insert(p.id.as_str());
            if p.title.trim().is_empty() {
                c.push(EmptyTitle, format!("{ppath}/title"), "prediction title is empty");
            }
        }
    }

    let question_ids: HashSet<&str> = label
        .questionnaire
        .iter()
        .map(|q| q.question_id.as_str())
        .collect();

    let check_scopes = |c: &mut Collector, scopes: &[Scope], path: &str| {
        if scopes.is_empty() {
            c.push(
                EmptyScope,
                path.to_string(),
                "scope is empty; use [{\"kind\":\"global\"}] for unscoped items",
            );
        }
        for (k, s) in scopes.iter().enumerate() {
            let spath = format!("{path}/{k}");
            let (use_case, prediction) = match s {
                Scope::Global => continue,
                Scope::UseCaseWide { use_case } => (use_case, None),
                Scope::Pair {
                    use_case,
                    prediction,
                } => (use_case, Some(prediction)),
            };
            let Some(owned) = use_case_ids.get(use_case.as_str()) else {
                c.push(
                    DanglingUseCase,
                    format!("{spath}/use_case"),
                    format!("scope references unknown use case {use_case:?}"),
                );
                continue;
            };
            if let Some(p) = prediction {
                if owned.contains(p.as_str()) {
                    continue;
                }
                if let Some(owner) = prediction_owner.get(p.as_str()) {
                    c.push(
                        PredictionUseCaseMismatch,
                        format!("{spath}/prediction"),
                        format!(
                            "prediction {p:?} belongs to use case {owner:?}, not {use_case:?}"
                        ),
                    );
                } else {
                    c.push(
                        DanglingPrediction,
                        format!("{spath}/prediction"),
                        format!("scope references unknown prediction {p:?}"),
                    );
                }
            }
        }
    };

    let check_mitigation =
        |c: &mut Collector, severity: Severity, mitigation: Option<&str>, path: &str| {
            let has = mitigation.is_some_and(|m| !m.trim().is_empty());
            if severity.requires_mitigation() && !has {
                c.push(
                    MitigationRequired,
                    format!("{path}/mitigation"),
                    format!("severity {severity} requires a mitigation"),
                );
            } else if !severity.requires_mitigation() && has {
                c.push(
                    MitigationForbidden,
                    format!("{path}/mitigation"),
                    "severity red means no mitigation is known; mitigation must be empty",
                );
            }
        };

    let check_item_id = |c: &mut Collector,
                         seen: &mut HashSet<String>,
                         id: &str,
                         dup: ViolationCode,
                         path: &str| {
        if id.is_empty() {
            c.push(EmptyId, format!("{path}/id"), "id is empty");
        } else if !seen.insert(id.to_string()) {
            c.push(
                dup,
                format!("{path}/id"),
                format!("id {id:?} is declared more than once"),
            );
        }
        if id.starts_with(MATERIALIZED_ID_PREFIX) {
            c.push(
                ReservedIdPrefix,
                format!("{path}/id"),
                format!("ids starting with {MATERIALIZED_ID_PREFIX:?} are reserved for questionnaire flags"),
            );
        }
    };

    let check_question_link = |c: &mut Collector, link: Option<&String>, path: &str| {
        if let Some(q) = link {
            if !question_ids.contains(q.as_str()) {
                c.push(
                    DanglingQuestion,
                    format!("{path}/derived_from_question"),
                    format!("derived_from_question references unknown question {q:?}"),
                );
            }
        }
    };

    let mut seen = HashSet::new();
    for (i, alert) in label.alerts.iter().enumerate() {
        c.enter();
        let path = format!("/alerts/{i}");
        let Alert {
            id,
            title,
            severity,
            mitigation,
            scope,
            derived_from_question,
            ..
        } = alert;
        check_item_id(&mut c, &mut seen, id, DuplicateAlertId, &path);
        if title.trim().is_empty() {
            c.push(EmptyTitle, format!("{path}/title"), "alert title is empty");
        }
        check_mitigation(&mut c, *severity, mitigation.as_deref(), &path);
        check_scopes(&mut c, scope, &format!("{path}/scope"));
        check_question_link(&mut c, derived_from_question.as_ref(), &path);
    }

    let mut seen = HashSet::new();
    for (i, fyi) in label.fyis.iter().enumerate() {
        c.enter();
        let path = format!("/fyis/{i}");
        check_item_id(&mut c, &mut seen, &fyi.id, DuplicateFyiId, &path);
        if fyi.title.trim().is_empty() {
            c.push(EmptyTitle, format!("{path}/title"), "FYI title is empty");
        }
        check_scopes(&mut c, &fyi.scope, &format!("{path}/scope"));
        check_question_link(&mut c, fyi.derived_from_question.as_ref(), &path);
    }

    let mut seen = HashSet::new();
    for (i, q) in label.questionnaire.iter().enumerate() {
        c.enter();
        let path = format!("/questionnaire/{i}");
        if q.question_id.is_empty() {
            c.push(EmptyId, format!("{path}/question_id"), "question id is empty");
        } else if !seen.insert(q.question_id.as_str()) {
            c.push(
                DuplicateQuestionId,
                format!("{path}/question_id"),
                format!("question id {:?} is declared more than once", q.question_id),
            );
        }
        let Some(rule) = &q.flag else { continue };
        let fpath = format!("{path}/flag");
        if rule.summary.trim().is_empty() {
            c.push(EmptyTitle, format!("{fpath}/summary"), "flag summary is empty");
        }
        match rule.kind {
            FlagKind::Alert => match rule.severity {
                Some(sev) => check_mitigation(&mut c, sev, rule.mitigation.as_deref(), &fpath),
                None => c.push(
                    FlagSeverityMissing,
                    format!("{fpath}/severity"),
                    "alert flags must carry a severity",
                ),
            },
            FlagKind::Fyi => {
                if rule.severity.is_some() {
                    c.push(
                        FyiHasSeverity,
                        format!("{fpath}/severity"),
                        "FYI flags are always green and carry no severity",
                    );
                }
                if rule.mitigation.is_some() {
                    c.push(
                        FyiHasMitigation,
                        format!("{fpath}/mitigation"),
                        "FYI flags need no mitigation",
                    );
                }
            }
        }
        check_scopes(&mut c, &rule.scope, &format!("{fpath}/scope"));
    }

    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{parse_label, Category, FlagRule, Fyi, Prediction, QuestionnaireAnswer, UseCase};
    use chrono::NaiveDate;

    fn base() -> Label {
        Label {
            label_id: "l".into(),
            schema_version: "1.0".into(),
            dataset_name: "d".into(),
            publisher: "p".into(),
            source_url: None,
            license: None,
            date_produced: NaiveDate::from_ymd_opt(2020, 11, 1).unwrap(),
            fingerprint: None,
            overview_modules: vec![],
            use_cases: vec![UseCase {
                id: "u1".into(),
                title: "Forecast".into(),
                description: String::new(),
                predictions: vec![
                    Prediction {
                        id: "p1".into(),
                        title: "Regression".into(),
                        method_description: String::new(),
                    },
                    Prediction {
                        id: "p2".into(),
                        title: "Classification".into(),
                        method_description: String::new(),
                    },
                ],
            }],
            alerts: vec![],
            fyis: vec![],
            questionnaire: vec![],
        }
    }

    fn alert(id: &str, severity: Severity, mitigation: Option<&str>, scope: Vec<Scope>) -> Alert {
        Alert {
            id: id.into(),
            title: "t".into(),
            description: String::new(),
            severity,
            mitigation: mitigation.map(Into::into),
            scope,
            derived_from_question: None,
        }
    }

    #[test]
    fn base_passes() {
        let r = validate_label(&base());
        assert!(r.violations.is_empty(), "{r:?}");
        assert_eq!(r.verdict(), Verdict::Pass);
    }

    #[test]
    fn dangling_prediction() {
        let mut l = base();
        l.alerts.push(alert(
            "a1",
            Severity::NoKnownMitigation,
            None,
            vec![Scope::Pair {
                use_case: "u1".into(),
                prediction: "p9".into(),
            }],
        ));
        let r = validate_label(&l);
        assert_eq!(r.codes(), vec![ViolationCode::DanglingPrediction]);
        assert_eq!(r.violations[0].path, "/alerts/0/scope/0/prediction");
        assert_eq!(r.verdict(), Verdict::Fail);
    }

    #[test]
    fn mitigation_rules() {
        let mut l = base();
        l.alerts.push(alert("a1", Severity::MitigationKnown, Some(""), vec![Scope::Global]));
        l.alerts.push(alert("a2", Severity::PartialMitigation, None, vec![Scope::Global]));
        l.alerts.push(alert("a3", Severity::NoKnownMitigation, Some("x"), vec![Scope::Global]));
        l.alerts.push(alert("a4", Severity::NoKnownMitigation, Some(" "), vec![Scope::Global]));
        let r = validate_label(&l);
        assert_eq!(
            r.codes(),
            vec![
                ViolationCode::MitigationRequired,
                ViolationCode::MitigationRequired,
                ViolationCode::MitigationForbidden
            ]
        );
    }

    #[test]
    fn fyi_flag_with_severity() {
        let mut l = base();
        l.questionnaire.push(QuestionnaireAnswer {
            question_id: "q1".into(),
            category: Category::Collection,
            question_text: "?".into(),
            answer: "yes".into(),
            flag: Some(FlagRule {
                kind: FlagKind::Fyi,
                severity: Some(Severity::MitigationKnown),
                mitigation: None,
                scope: vec![Scope::Global],
                summary: "s".into(),
            }),
        });
        let r = validate_label(&l);
        assert_eq!(r.codes(), vec![ViolationCode::FyiHasSeverity]);
    }

    #[test]
    fn badge_mismatch_is_a_warning() {
        let mut l = base();
        l.alerts.push(alert("a1", Severity::NoKnownMitigation, None, vec![Scope::Global]));
        l.overview_modules.push(OverviewModule::Badges {
            use_case_count: 1,
            alert_count: 2,
            fyi_count: 0,
        });
        let r = validate_label(&l);
        assert_eq!(r.codes(), vec![ViolationCode::BadgeCountMismatch]);
        assert_eq!(r.violations[0].level, ViolationLevel::Warning);
        assert!(r.passed());
    }

    #[test]
    fn referential_and_uniqueness_rules() {
        let mut l = base();
        l.use_cases.push(UseCase {
            id: "u2".into(),
            title: "  FORECAST ".into(),
            description: String::new(),
            predictions: vec![],
        });
        l.fyis.push(Fyi {
            id: "f1".into(),
            title: "t".into(),
            description: String::new(),
            scope: vec![
                Scope::UseCaseWide {
                    use_case: "nope".into(),
                },
                Scope::Pair {
                    use_case: "u2".into(),
                    prediction: "p1".into(),
                },
            ],
            derived_from_question: Some("q404".into()),
        });
        l.fyis.push(Fyi {
            id: "f1".into(),
            title: "t".into(),
            description: String::new(),
            scope: vec![],
            derived_from_question: None,
        });
        let r = validate_label(&l);
        assert_eq!(
            r.codes(),
            vec![
                ViolationCode::DuplicateUseCaseTitle,
                ViolationCode::NoPredictions,
                ViolationCode::DanglingQuestion,
                ViolationCode::DanglingUseCase,
                ViolationCode::PredictionUseCaseMismatch,
                ViolationCode::DuplicateFyiId,
                ViolationCode::EmptyScope,
            ]
        );
    }

    #[test]
    fn reserved_prefix_and_schema_version() {
        let mut l = base();
        l.schema_version = "2.0".into();
        l.alerts.push(alert("q:x", Severity::NoKnownMitigation, None, vec![Scope::Global]));
        let r = validate_label(&l);
        assert_eq!(
            r.codes(),
            vec![
                ViolationCode::UnsupportedSchemaVersion,
                ViolationCode::ReservedIdPrefix
            ]
        );
    }

    #[test]
    fn fingerprint_digest_must_match_names() {
        let mut l = base();
        let mut fp = compute_fingerprint(&["a".to_string(), "b".to_string()]).unwrap();
        l.fingerprint = Some(fp.clone());
        assert!(validate_label(&l).violations.is_empty());
        fp.digest = "00".repeat(32);
        l.fingerprint = Some(fp);
        assert_eq!(validate_label(&l).codes(), vec![ViolationCode::FingerprintMismatch]);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_title("  forecast CASE\tcounts "), "forecast case counts");
        assert_eq!(normalize_title("   "), "");
    }

    #[test]
    fn report_serializes_with_verdict() {
        let mut l = base();
        l.label_id.clear();
        let r = validate_label(&l);
        let json = crate::canonical::to_canonical_vec(&r).unwrap();
        assert_eq!(
            std::str::from_utf8(&json).unwrap(),
            r#"{"verdict":"fail","violations":[{"code":"EMPTY_LABEL_ID","level":"error","message":"label_id must not be empty","path":"/label_id"}]}"#
        );
    }

    #[test]
    fn parsed_label_can_be_validated() {
        let doc = br#"{"label_id":"l1","schema_version":"1.0","dataset_name":"d","publisher":"p","date_produced":"2020-11-01","overview_modules":[],"use_cases":[],"alerts":[],"fyis":[],"questionnaire":[]}"#;
        assert!(validate_label(&parse_label(doc).unwrap()).passed());
    }
}
