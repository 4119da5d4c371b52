use std::collections::BTreeMap;

use chrono::{NaiveDate, TimeZone, Utc};
use dnl_core::label::{
    Alert, Category, FlagKind, FlagRule, Fyi, Label, OverviewModule, Prediction,
    QuestionnaireAnswer, Scope, Severity, UseCase, ViolationCode, SCHEMA_VERSION,
};
use dnl_core::profiler::{compute_fingerprint, profile_csv_at};
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::csv_gen::random_table;

#[derive(Debug, Clone, Copy)]
pub struct LabelShape {
    pub max_use_cases: usize,
    pub max_predictions: usize,
    /// Upper bound on alerts + FYIs + flagged questions together.
    pub max_items: usize,
}

impl Default for LabelShape {
    fn default() -> Self {
        LabelShape {
            max_use_cases: 10,
            max_predictions: 4,
            max_items: 40,
        }
    }
}

const WORDS: &[&str] = &[
    "case", "count", "forecast", "state", "hospital", "équité", "데이터", "\"quoted\"", "a\\b",
    "tab\there", "line\nbreak", "<tag>", "&amp;", "emoji 🧪", "", "  spaced  ", "ZERO\u{0}",
];

fn text<R: Rng>(rng: &mut R, max_words: usize) -> String {
    let n = rng.random_range(0..=max_words);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn nonempty_text<R: Rng>(rng: &mut R, tag: &str) -> String {
    format!("{tag} {}", text(rng, 3))
}

fn severity<R: Rng>(rng: &mut R) -> Severity {
    *Severity::ALL.choose(rng).unwrap()
}

fn mitigation_for<R: Rng>(rng: &mut R, s: Severity) -> Option<String> {
    if s.requires_mitigation() {
        Some(nonempty_text(rng, "mitigate"))
    } else if rng.random_bool(0.3) {
        Some(String::new())
    } else {
        None
    }
}

fn scopes<R: Rng>(rng: &mut R, use_cases: &[UseCase]) -> Vec<Scope> {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| {
            if use_cases.is_empty() || rng.random_bool(0.15) {
                return Scope::Global;
            }
            let u = use_cases.choose(rng).unwrap();
            if rng.random_bool(0.3) {
                Scope::UseCaseWide {
                    use_case: u.id.clone(),
                }
            } else {
                Scope::Pair {
                    use_case: u.id.clone(),
                    prediction: u.predictions.choose(rng).unwrap().id.clone(),
                }
            }
        })
        .collect()
}

/// A random label that passes validation.
pub fn random_label<R: Rng>(rng: &mut R, shape: LabelShape) -> Label {
    let n_uc = rng.random_range(0..=shape.max_use_cases);
    let mut next_pred = 0;
    let use_cases: Vec<UseCase> = (0..n_uc)
        .map(|i| {
            let n_p = rng.random_range(1..=shape.max_predictions.max(1));
            UseCase {
                id: format!("u{i}"),
                title: format!("Use case {i} {}", text(rng, 2)),
                description: text(rng, 6),
                predictions: (0..n_p)
                    .map(|_| {
                        next_pred += 1;
                        Prediction {
                            id: format!("p{next_pred}"),
                            title: nonempty_text(rng, "method"),
                            method_description: text(rng, 5),
                        }
                    })
                    .collect(),
            }
        })
        .collect();

    let n_items = rng.random_range(0..=shape.max_items);
    let mut alerts = Vec::new();
    let mut fyis = Vec::new();
    let mut questionnaire = Vec::new();
    for i in 0..n_items {
        match rng.random_range(0..3) {
            0 => {
                let s = severity(rng);
                alerts.push(Alert {
                    id: format!("a{i}"),
                    title: nonempty_text(rng, "alert"),
                    description: text(rng, 6),
                    severity: s,
                    mitigation: mitigation_for(rng, s),
                    scope: scopes(rng, &use_cases),
                    derived_from_question: None,
                });
            }
            1 => fyis.push(Fyi {
                id: format!("f{i}"),
                title: nonempty_text(rng, "fyi"),
                description: text(rng, 6),
                scope: scopes(rng, &use_cases),
                derived_from_question: None,
            }),
            _ => {
                let kind = if rng.random_bool(0.6) {
                    FlagKind::Alert
                } else {
                    FlagKind::Fyi
                };
                let (severity, mitigation) = match kind {
                    FlagKind::Alert => {
                        let s = severity(rng);
                        (Some(s), mitigation_for(rng, s))
                    }
                    FlagKind::Fyi => (None, None),
                };
                questionnaire.push(QuestionnaireAnswer {
                    question_id: format!("fq{i}"),
                    category: *Category::ALL.choose(rng).unwrap(),
                    question_text: nonempty_text(rng, "question?"),
                    answer: if rng.random_bool(0.8) {
                        nonempty_text(rng, "answer")
                    } else {
                        String::new()
                    },
                    flag: Some(FlagRule {
                        kind,
                        severity,
                        mitigation,
                        scope: scopes(rng, &use_cases),
                        summary: nonempty_text(rng, "summary"),
                    }),
                });
            }
        }
    }
    // a few unflagged questions
    for i in 0..rng.random_range(0..4) {
        questionnaire.push(QuestionnaireAnswer {
            question_id: format!("plain{i}"),
            category: *Category::ALL.choose(rng).unwrap(),
            question_text: nonempty_text(rng, "question?"),
            answer: text(rng, 4),
            flag: None,
        });
    }
    // some authored items refine a flagged question
    let flagged: Vec<String> = questionnaire
        .iter()
        .filter(|q| q.flag.is_some())
        .map(|q| q.question_id.clone())
        .collect();
    if !flagged.is_empty() {
        for a in alerts.iter_mut() {
            if rng.random_bool(0.15) {
                a.derived_from_question = Some(flagged.choose(rng).unwrap().clone());
            }
        }
        for f in fyis.iter_mut() {
            if rng.random_bool(0.15) {
                f.derived_from_question = Some(flagged.choose(rng).unwrap().clone());
            }
        }
    }

    let date_produced = NaiveDate::from_ymd_opt(2018 + rng.random_range(0..6), rng.random_range(1..=12), rng.random_range(1..=28)).unwrap();

    let mut overview_modules = Vec::new();
    let mut fingerprint = None;
    if rng.random_bool(0.5) {
        let table = random_table(rng, 6, 4);
        let at = Utc
            .timestamp_opt(1_600_000_000 + rng.random_range(0..100_000_000), rng.random_range(0..1_000_000_000))
            .unwrap();
        let profile = profile_csv_at(table.text.as_bytes(), at).expect("generated tables profile");
        fingerprint = Some(profile.fingerprint.clone());
        overview_modules.push(OverviewModule::ComputedStats { profile });
    } else if rng.random_bool(0.3) {
        let names: Vec<String> = (0..rng.random_range(1..5)).map(|i| format!("col{i} {}", text(rng, 1))).collect();
        fingerprint = Some(compute_fingerprint(&names).unwrap());
    }
    if rng.random_bool(0.6) {
        let mut facts = BTreeMap::new();
        for _ in 0..rng.random_range(0..4) {
            facts.insert(nonempty_text(rng, "fact"), text(rng, 3));
        }
        overview_modules.push(OverviewModule::KeyFacts { facts });
    }
    if rng.random_bool(0.6) {
        overview_modules.push(OverviewModule::Badges {
            use_case_count: use_cases.len() as u64,
            alert_count: alerts.len() as u64,
            fyi_count: fyis.len() as u64,
        });
    }
    if rng.random_bool(0.4) {
        overview_modules.push(OverviewModule::FreeText {
            title: text(rng, 2),
            text: text(rng, 10),
        });
    }

    Label {
        label_id: format!("label-{}", rng.random::<u32>()),
        schema_version: SCHEMA_VERSION.to_string(),
        dataset_name: nonempty_text(rng, "dataset"),
        publisher: text(rng, 2),
        source_url: rng.random_bool(0.5).then(|| "https://example.org/data?x=1&y=2".to_string()),
        license: rng.random_bool(0.5).then(|| "CC-BY-4.0".to_string()),
        date_produced,
        fingerprint,
        overview_modules,
        use_cases,
        alerts,
        fyis,
        questionnaire,
    }
}

/// Breaks exactly one invariant of a valid label and returns the code the
/// validator is expected to report. `None` when the label has nothing the
/// chosen perturbation can act on.
pub fn perturb_one_invariant<R: Rng>(rng: &mut R, label: &mut Label) -> Option<ViolationCode> {
    let choice = rng.random_range(0..10);
    match choice {
        0 => {
            label.label_id.clear();
            Some(ViolationCode::EmptyLabelId)
        }
        1 => {
            label.schema_version = "0.9".into();
            Some(ViolationCode::UnsupportedSchemaVersion)
        }
        2 => {
            let a = label.alerts.first_mut()?;
            a.scope.push(Scope::UseCaseWide {
                use_case: "no-such-use-case".into(),
            });
            Some(ViolationCode::DanglingUseCase)
        }
        3 => {
            let u = label.use_cases.first()?.id.clone();
            let a = label.alerts.first_mut()?;
            a.scope.push(Scope::Pair {
                use_case: u,
                prediction: "no-such-prediction".into(),
            });
            Some(ViolationCode::DanglingPrediction)
        }
        4 => {
            let a = label.alerts.iter_mut().find(|a| a.severity.requires_mitigation())?;
            a.mitigation = None;
            Some(ViolationCode::MitigationRequired)
        }
        5 => {
            let a = label.alerts.iter_mut().find(|a| !a.severity.requires_mitigation())?;
            a.mitigation = Some("do something".into());
            Some(ViolationCode::MitigationForbidden)
        }
        6 => {
            let dup = label.use_cases.first()?.id.clone();
            let mut copy = label.use_cases[0].clone();
            copy.id = dup;
            copy.title = format!("{} duplicate", copy.title);
            copy.predictions = vec![Prediction {
                id: "fresh-prediction".into(),
                title: "t".into(),
                method_description: String::new(),
            }];
            label.use_cases.push(copy);
            Some(ViolationCode::DuplicateUseCaseId)
        }
        7 => {
            let f = label.fyis.first_mut()?;
            f.scope.clear();
            Some(ViolationCode::EmptyScope)
        }
        8 => {
            let rule = label
                .questionnaire
                .iter_mut()
                .filter_map(|q| q.flag.as_mut())
                .find(|r| r.kind == FlagKind::Fyi)?;
            rule.severity = Some(Severity::MitigationKnown);
            Some(ViolationCode::FyiHasSeverity)
        }
        _ => {
            let u = label.use_cases.last_mut()?;
            u.predictions.clear();
            Some(ViolationCode::NoPredictions)
        }
    }
}
