use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::NaiveDate;
use dnl_core::label::{FlagKind, Label, Scope, Severity};

// ---------------------------------------------------------------------------
// resolution

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleView {
    pub alert_ids: Vec<String>,
    pub fyi_ids: Vec<String>,
    pub red: u64,
    pub orange: u64,
    pub yellow: u64,
}

fn covers(scopes: &[Scope], u: &str, p: &str) -> bool {
    let mut hit = false;
    for s in scopes {
        hit |= match s {
            Scope::Global => true,
            Scope::UseCaseWide { use_case } => use_case.as_str() == u,
            Scope::Pair {
                use_case,
                prediction,
            } => use_case.as_str() == u && prediction.as_str() == p,
        };
    }
    hit
}

struct Item {
    id: String,
    severity: Option<Severity>,
    scope: Vec<Scope>,
}

/// (authored alerts, authored FYIs, materialized alerts, materialized FYIs)
fn items(label: &Label) -> (Vec<Item>, Vec<Item>, Vec<Item>, Vec<Item>) {
    let mut refined = HashSet::new();
    for a in &label.alerts {
        if let Some(q) = &a.derived_from_question {
            refined.insert(q.clone());
        }
    }
    for f in &label.fyis {
        if let Some(q) = &f.derived_from_question {
            refined.insert(q.clone());
        }
    }
    let authored_alerts = label
        .alerts
        .iter()
        .map(|a| Item {
            id: a.id.clone(),
            severity: Some(a.severity),
            scope: a.scope.clone(),
        })
        .collect();
    let authored_fyis = label
        .fyis
        .iter()
        .map(|f| Item {
            id: f.id.clone(),
            severity: None,
            scope: f.scope.clone(),
        })
        .collect();
    let mut mat_alerts = Vec::new();
    let mut mat_fyis = Vec::new();
    for q in &label.questionnaire {
        let Some(rule) = &q.flag else { continue };
        if q.answer.trim().is_empty() || refined.contains(&q.question_id) {
            continue;
        }
        let item = Item {
            id: format!("q:{}", q.question_id),
            severity: rule.severity,
            scope: rule.scope.clone(),
        };
        match rule.kind {
            FlagKind::Alert => mat_alerts.push(item),
            FlagKind::Fyi => mat_fyis.push(item),
        }
    }
    (authored_alerts, authored_fyis, mat_alerts, mat_fyis)
}

/// Filter every item by hand and bucket alerts by severity, red first.
pub fn brute_force_resolve(label: &Label, use_case_id: &str, prediction_id: &str) -> OracleView {
    let (aa, af, ma, mf) = items(label);
    let mut view = OracleView {
        alert_ids: vec![],
        fyi_ids: vec![],
        red: 0,
        orange: 0,
        yellow: 0,
    };
    for sev in [
        Severity::NoKnownMitigation,
        Severity::PartialMitigation,
        Severity::MitigationKnown,
    ] {
        for group in [&aa, &ma] {
            for item in group.iter() {
                if item.severity == Some(sev) && covers(&item.scope, use_case_id, prediction_id) {
                    view.alert_ids.push(item.id.clone());
                    match sev {
                        Severity::NoKnownMitigation => view.red += 1,
                        Severity::PartialMitigation => view.orange += 1,
                        Severity::MitigationKnown => view.yellow += 1,
                    }
                }
            }
        }
    }
    for group in [&af, &mf] {
        for item in group.iter() {
            if covers(&item.scope, use_case_id, prediction_id) {
                view.fyi_ids.push(item.id.clone());
            }
        }
    }
    view
}

/// Per label: `None` when no use case title matches, otherwise
/// (red, orange, yellow, fyi) over the union of the use case's predictions.
pub fn brute_force_compare(labels: &[Label], title: &str) -> Vec<Option<(u64, u64, u64, u64)>> {
    let norm = |s: &str| s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    let wanted = norm(title);
    labels
        .iter()
        .map(|label| {
            let uc = label.use_cases.iter().find(|u| norm(&u.title) == wanted)?;
            let (aa, _, ma, _) = items(label);
            let severity_of: BTreeMap<String, Severity> = aa
                .iter()
                .chain(ma.iter())
                .map(|i| (i.id.clone(), i.severity.unwrap()))
                .collect();
            let mut alert_ids = BTreeSet::new();
            let mut fyi_ids = BTreeSet::new();
            for p in &uc.predictions {
                let v = brute_force_resolve(label, &uc.id, &p.id);
                alert_ids.extend(v.alert_ids);
                fyi_ids.extend(v.fyi_ids);
            }
            let count = |s: Severity| {
                alert_ids
                    .iter()
                    .filter(|id| severity_of[id.as_str()] == s)
                    .count() as u64
            };
            Some((
                count(Severity::NoKnownMitigation),
                count(Severity::PartialMitigation),
                count(Severity::MitigationKnown),
                fyi_ids.len() as u64,
            ))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// profiling

#[derive(Debug, Clone, PartialEq)]
pub struct OracleColumn {
    pub name: String,
    pub inferred_type: &'static str,
    pub missing_count: u64,
    pub distinct_count: u64,
    pub numeric_range: Option<(f64, f64)>,
    pub date_range: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleProfile {
    pub row_count: u64,
    pub columns: Vec<OracleColumn>,
}

/// Splits RFC 4180 text into records: quoted fields, doubled quotes,
/// LF or CRLF line ends. Blank lines are skipped.
fn parse_records(text: &str) -> Vec<Vec<String>> {
    let mut records = Vec::new();
    let mut record = Vec::new();
    let mut field = String::new();
    let mut in_quotes = false;
    let mut field_started = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if in_quotes {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push(c);
            }
            continue;
        }
        match c {
            '"' => {
                in_quotes = true;
                field_started = true;
            }
            ',' => {
                record.push(std::mem::take(&mut field));
                field_started = true;
            }
            '\r' if chars.peek() == Some(&'\n') => {}
            '\n' => {
                if field_started || !field.is_empty() || !record.is_empty() {
                    record.push(std::mem::take(&mut field));
                    records.push(std::mem::take(&mut record));
                }
                field_started = false;
            }
            c => {
                field.push(c);
                field_started = true;
            }
        }
    }
    if field_started || !field.is_empty() || !record.is_empty() {
        record.push(field);
        records.push(record);
    }
    records
}

fn oracle_missing(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "" | "na" | "n/a" | "null" | "nan")
}

fn oracle_int(s: &str) -> Option<i64> {
    s.parse::<i64>().ok()
}

fn oracle_float(s: &str) -> Option<f64> {
    if s.chars().any(|c| c.is_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    s.parse::<f64>().ok().filter(|f| f.is_finite())
}

fn oracle_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    let digits = |r: std::ops::Range<usize>| -> Option<u32> {
        let part = &s[r];
        part.bytes().all(|c| c.is_ascii_digit()).then(|| part.parse().ok())?
    };
    NaiveDate::from_ymd_opt(digits(0..4)? as i32, digits(5..7)?, digits(8..10)?)
}

/// Loads the whole table and counts everything directly.
pub fn oracle_profile(text: &str) -> OracleProfile {
    let records = parse_records(text);
    let (header, body) = records.split_first().expect("table has a header");
    let columns = header
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let cells: Vec<&str> = body.iter().map(|r| r[i].as_str()).collect();
            let present: Vec<&str> = cells.iter().copied().filter(|c| !oracle_missing(c)).collect();
            let distinct: HashSet<&str> = present.iter().copied().collect();
            let all = |f: &dyn Fn(&str) -> bool| !present.is_empty() && present.iter().all(|v| f(v));
            let inferred_type = if all(&|v| oracle_int(v).is_some()) {
                "integer"
            } else if all(&|v| oracle_float(v).is_some()) {
                "float"
            } else if all(&|v| matches!(v.to_lowercase().as_str(), "true" | "false")) {
                "boolean"
            } else if all(&|v| oracle_date(v).is_some()) {
                "date"
            } else {
                "string"
            };
            let numeric_range = match inferred_type {
                "integer" | "float" => {
                    let vals: Vec<f64> = present
                        .iter()
                        .map(|v| match inferred_type {
                            "integer" => oracle_int(v).unwrap() as f64,
                            _ => oracle_float(v).unwrap(),
                        })
                        .collect();
                    Some((
                        vals.iter().copied().fold(f64::INFINITY, f64::min),
                        vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    ))
                }
                _ => None,
            };
            let date_range = (inferred_type == "date").then(|| {
                let mut ds: Vec<NaiveDate> = present.iter().map(|v| oracle_date(v).unwrap()).collect();
                ds.sort();
                (ds[0].to_string(), ds[ds.len() - 1].to_string())
            });
            OracleColumn {
                name: name.clone(),
                inferred_type,
                missing_count: (cells.len() - present.len()) as u64,
                distinct_count: distinct.len() as u64,
                numeric_range,
                date_range,
            }
        })
        .collect();
    OracleProfile {
        row_count: body.len() as u64,
        columns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_splitting() {
        let r = parse_records("a,b\r\n\"x,\"\"y\",\n\"\"\n");
        assert_eq!(r, vec![vec!["a", "b"], vec!["x,\"y", ""], vec![""]]);
    }

    #[test]
    fn hand_counted_example() {
        let p = oracle_profile("a,b\n1,\n2,x\n3,\n4,y\n");
        assert_eq!(p.row_count, 4);
        assert_eq!(p.columns[1].missing_count, 2);
        assert_eq!(p.columns[1].distinct_count, 2);
        assert_eq!(p.columns[0].inferred_type, "integer");
        assert_eq!(p.columns[0].numeric_range, Some((1.0, 4.0)));
    }
}
