//! Use-case scoped resolution of alerts and FYIs.
//!
//! Selecting a use case and then one of its predictions yields the alerts
//! and FYIs whose scope covers that pair. Flagged questionnaire answers are
//! materialized into extra items first. Alerts come out most severe first;
//! within one severity, authored items precede materialized ones and each
//! group keeps declaration order. FYIs keep declaration order only.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::label::{
    Alert, FlagKind, Fyi, Label, Prediction, Severity, MATERIALIZED_ID_PREFIX,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UseCaseListing {
    pub use_case_id: String,
    pub title: String,
    pub description: String,
    pub predictions: Vec<Prediction>,
}

/// Use cases with their predictions, in declaration order.
pub fn list_use_cases(label: &Label) -> Vec<UseCaseListing> {
    label
        .use_cases
        .iter()
        .map(|u| UseCaseListing {
            use_case_id: u.id.clone(),
            title: u.title.clone(),
            description: u.description.clone(),
            predictions: u.predictions.clone(),
        })
        .collect()
}

/// One alert or FYI per answered question that carries a flag rule.
///
/// Items get id `q:<question_id>`, the rule's summary as title, the answer
/// as description, and a link back to the question.
pub fn materialize_questionnaire_flags(label: &Label) -> (Vec<Alert>, Vec<Fyi>) {
    let mut alerts = Vec::new();
    let mut fyis = Vec::new();
    for q in &label.questionnaire {
        let Some(rule) = &q.flag else { continue };
        if !q.is_answered() {
            continue;
        }
        let id = format!("{MATERIALIZED_ID_PREFIX}{}", q.question_id);
        match rule.kind {
            FlagKind::Alert => alerts.push(Alert {
                id,
                title: rule.summary.clone(),
                description: q.answer.clone(),
                // validation guarantees a severity; fall back to the most
                // conservative point if called on an unvalidated label
                severity: rule.severity.unwrap_or(Severity::NoKnownMitigation),
                mitigation: rule.mitigation.clone(),
                scope: rule.scope.clone(),
                derived_from_question: Some(q.question_id.clone()),
            }),
            FlagKind::Fyi => fyis.push(Fyi {
                id,
                title: rule.summary.clone(),
                description: q.answer.clone(),
                scope: rule.scope.clone(),
                derived_from_question: Some(q.question_id.clone()),
            }),
        }
    }
    (alerts, fyis)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SeverityCounts {
    pub red: u64,
    pub orange: u64,
    pub yellow: u64,
}

impl SeverityCounts {
    pub fn add(&mut self, severity: Severity) {
        *self.get_mut(severity) += 1;
    }

    pub fn get(&self, severity: Severity) -> u64 {
        match severity {
            Severity::NoKnownMitigation => self.red,
            Severity::PartialMitigation => self.orange,
            Severity::MitigationKnown => self.yellow,
        }
    }

    fn get_mut(&mut self, severity: Severity) -> &mut u64 {
        match severity {
            Severity::NoKnownMitigation => &mut self.red,
            Severity::PartialMitigation => &mut self.orange,
            Severity::MitigationKnown => &mut self.yellow,
        }
    }

    pub fn total(&self) -> u64 {
        self.red + self.orange + self.yellow
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedView {
    pub use_case_id: String,
    pub prediction_id: String,
    pub alerts: Vec<Alert>,
    pub fyis: Vec<Fyi>,
    pub severity_summary: SeverityCounts,
}

impl ResolvedView {
    pub fn alert_ids(&self) -> Vec<&str> {
        self.alerts.iter().map(|a| a.id.as_str()).collect()
    }

    pub fn fyi_ids(&self) -> Vec<&str> {
        self.fyis.iter().map(|f| f.id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown use case {0:?}")]
    UnknownUseCase(String),
    #[error("unknown prediction {0:?}")]
    UnknownPrediction(String),
    #[error("prediction {prediction_id:?} does not belong to use case {use_case_id:?}")]
    PredictionNotInUseCase {
        use_case_id: String,
        prediction_id: String,
    },
}

impl ResolveError {
    pub fn code(&self) -> &'static str {
        match self {
            ResolveError::UnknownUseCase(_) => "UNKNOWN_USE_CASE",
            ResolveError::UnknownPrediction(_) => "UNKNOWN_PREDICTION",
            ResolveError::PredictionNotInUseCase { .. } => "PREDICTION_NOT_IN_USE_CASE",
        }
    }
}

/// Alerts and FYIs relevant to one (use case, prediction) selection.
///
/// A materialized item is dropped when an authored alert or FYI already
/// links to the same question.
pub fn resolve(
    label: &Label,
    use_case_id: &str,
    prediction_id: &str,
) -> Result<ResolvedView, ResolveError> {
    let use_case = label
        .use_case(use_case_id)
        .ok_or_else(|| ResolveError::UnknownUseCase(use_case_id.to_string()))?;
    if use_case.prediction(prediction_id).is_none() {
        let exists = label
            .use_cases
            .iter()
            .any(|u| u.prediction(prediction_id).is_some());
        return Err(if exists {
            ResolveError::PredictionNotInUseCase {
                use_case_id: use_case_id.to_string(),
                prediction_id: prediction_id.to_string(),
            }
        } else {
            ResolveError::UnknownPrediction(prediction_id.to_string())
        });
    }

    let refined: HashSet<&str> = label
        .alerts
        .iter()
        .filter_map(|a| a.derived_from_question.as_deref())
        .chain(
            label
                .fyis
                .iter()
                .filter_map(|f| f.derived_from_question.as_deref()),
        )
        .collect();
    let (materialized_alerts, materialized_fyis) = materialize_questionnaire_flags(label);
    let is_refined = |q: &Option<String>| q.as_deref().is_some_and(|q| refined.contains(q));

    // (authored = 0 / materialized = 1, alert); the stable sort keeps
    // declaration order inside each group
    let mut alerts: Vec<(u8, Alert)> = label
        .alerts
        .iter()
        .filter(|a| a.applies_to(use_case_id, prediction_id))
        .cloned()
        .map(|a| (0, a))
        .chain(
            materialized_alerts
                .into_iter()
                .filter(|a| !is_refined(&a.derived_from_question))
                .filter(|a| a.applies_to(use_case_id, prediction_id))
                .map(|a| (1, a)),
        )
        .collect();
    alerts.sort_by(|(oa, a), (ob, b)| b.severity.cmp(&a.severity).then(oa.cmp(ob)));

    let fyis: Vec<Fyi> = label
        .fyis
        .iter()
        .filter(|f| f.applies_to(use_case_id, prediction_id))
        .cloned()
        .chain(
            materialized_fyis
                .into_iter()
                .filter(|f| !is_refined(&f.derived_from_question))
                .filter(|f| f.applies_to(use_case_id, prediction_id)),
        )
        .collect();

    let mut severity_summary = SeverityCounts::default();
    let alerts: Vec<Alert> = alerts
        .into_iter()
        .map(|(_, a)| {
            severity_summary.add(a.severity);
            a
        })
        .collect();

    Ok(ResolvedView {
        use_case_id: use_case_id.to_string(),
        prediction_id: prediction_id.to_string(),
        alerts,
        fyis,
        severity_summary,
    })
}

/// Resolves every (use case, prediction) pair, in declaration order.
pub fn resolve_all(label: &Label) -> Result<Vec<ResolvedView>, ResolveError> {
    label
        .use_cases
        .iter()
        .flat_map(|u| u.predictions.iter().map(move |p| (u, p)))
        .map(|(u, p)| resolve(label, &u.id, &p.id))
        .collect()
}
