use std::collections::HashSet;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use super::DatasetProfile;
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StalenessVerdict {
    Fresh,
    Stale,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StalenessReport {
    pub verdict: StalenessVerdict,
    /// Columns in the data but not the label, in data order.
    pub added_columns: Vec<String>,
    /// Columns in the label but not the data, in label order.
    pub removed_columns: Vec<String>,
    /// Same column set, different sequence.
    pub reordered: bool,
    pub label_date: NaiveDate,
    pub note: String,
}

impl StalenessReport {
    pub fn is_fresh(&self) -> bool {
        self.verdict == StalenessVerdict::Fresh
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StalenessError {
    #[error("label has no structural fingerprint")]
    LabelHasNoFingerprint,
}

impl StalenessError {
    pub fn code(&self) -> &'static str {
        match self {
            StalenessError::LabelHasNoFingerprint => "LABEL_HAS_NO_FINGERPRINT",
        }
    }
}

fn difference(from: &[String], exclude: &HashSet<&str>) -> Vec<String> {
    let mut seen = HashSet::new();
    from.iter()
        .filter(|c| !exclude.contains(c.as_str()) && seen.insert(c.as_str()))
        .cloned()
        .collect()
}

/// Compares the column structure a label was produced against with the
/// structure of freshly profiled data. The verdict is `fresh` exactly when
/// the two digests agree.
pub fn check_staleness(
    label: &Label,
    profile: &DatasetProfile,
) -> Result<StalenessReport, StalenessError> {
    let recorded = label
        .fingerprint
        .as_ref()
        .ok_or(StalenessError::LabelHasNoFingerprint)?;
    let current = &profile.fingerprint;

    let recorded_set: HashSet<&str> = recorded.column_names.iter().map(String::as_str).collect();
    let current_set: HashSet<&str> = current.column_names.iter().map(String::as_str).collect();
    let added_columns = difference(&current.column_names, &recorded_set);
    let removed_columns = difference(&recorded.column_names, &current_set);
    let reordered =
        recorded_set == current_set && recorded.column_names != current.column_names;

    let fresh = recorded.digest == current.digest;
    let label_date = label.date_produced;
    let note = if fresh {
        format!(
            "Label produced {label_date}; the dataset still has the structure it was documented with."
        )
    } else {
        let mut changes = Vec::new();
        if !added_columns.is_empty() {
            changes.push(format!("added {}", added_columns.join(", ")));
        }
        if !removed_columns.is_empty() {
            changes.push(format!("removed {}", removed_columns.join(", ")));
        }
        if reordered {
            changes.push("columns reordered".to_string());
        }
        format!(
            "Label produced {label_date}; the dataset structure has changed since ({}). Label content may no longer apply.",
            changes.join("; ")
        )
    };

    Ok(StalenessReport {
        verdict: if fresh {
            StalenessVerdict::Fresh
        } else {
            StalenessVerdict::Stale
        },
        added_columns,
        removed_columns,
        reordered,
        label_date,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{Label, SCHEMA_VERSION};
    use crate::profiler::{compute_fingerprint, profile_csv_at};
    use chrono::{TimeZone, Utc};

    fn label_over(columns: &[&str]) -> Label {
        Label {
            label_id: "covid".into(),
            schema_version: SCHEMA_VERSION.into(),
            dataset_name: "COVID".into(),
            publisher: "p".into(),
            source_url: None,
            license: None,
            date_produced: NaiveDate::from_ymd_opt(2020, 11, 1).unwrap(),
            fingerprint: Some(compute_fingerprint(columns).unwrap()),
            overview_modules: vec![],
            use_cases: vec![],
            alerts: vec![],
            fyis: vec![],
            questionnaire: vec![],
        }
    }

    fn data(header: &str) -> DatasetProfile {
        let at = Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap();
        profile_csv_at(format!("{header}\n").as_bytes(), at).unwrap()
    }

    #[test]
    fn identical_structure_is_fresh() {
        let r = check_staleness(&label_over(&["date", "state", "positive"]), &data("date,state,positive")).unwrap();
        assert_eq!(r.verdict, StalenessVerdict::Fresh);
        assert!(r.added_columns.is_empty() && r.removed_columns.is_empty() && !r.reordered);
        assert!(r.note.contains("2020-11-01"));
    }

    #[test]
    fn added_column_is_stale() {
        let r = check_staleness(
            &label_over(&["date", "state", "positive"]),
            &data("date,state,positive,deaths"),
        )
        .unwrap();
        assert_eq!(r.verdict, StalenessVerdict::Stale);
        assert_eq!(r.added_columns, ["deaths"]);
        assert!(r.removed_columns.is_empty());
        assert!(!r.reordered);
        assert!(r.note.contains("2020-11-01") && r.note.contains("deaths"));
    }

    #[test]
    fn reordered_columns_are_stale() {
        let r = check_staleness(&label_over(&["date", "state", "positive"]), &data("state,date,positive")).unwrap();
        assert_eq!(r.verdict, StalenessVerdict::Stale);
        assert!(r.reordered);
        assert!(r.added_columns.is_empty() && r.removed_columns.is_empty());
    }

    #[test]
    fn removed_column() {
        let r = check_staleness(&label_over(&["date", "state", "positive"]), &data("date,positive")).unwrap();
        assert_eq!(r.removed_columns, ["state"]);
        assert!(!r.reordered);
    }

    #[test]
    fn requires_fingerprint() {
        let mut l = label_over(&["a"]);
        l.fingerprint = None;
        assert_eq!(
            check_staleness(&l, &data("a")),
            Err(StalenessError::LabelHasNoFingerprint)
        );
    }
}
