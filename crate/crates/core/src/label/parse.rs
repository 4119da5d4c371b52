use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{
    Alert, Category, FlagKind, FlagRule, Fyi, Label, OverviewModule, Prediction,
    QuestionnaireAnswer, Scope, Severity, UseCase,
};
use crate::profiler::{ColumnBound, ColumnProfile, ColumnType, DatasetProfile, StructuralFingerprint};

/// Structural problems found while reading a label document.
///
/// Paths are JSON pointers into the document (`/alerts/0/severity`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    MalformedSyntax(String),
    #[error("missing field {0}")]
    MissingField(String),
    #[error("unknown field {0}")]
    UnknownField(String),
    #[error("bad value {got:?} at {path}")]
    BadEnumValue { path: String, got: String },
    #[error("bad date {got:?} at {path}")]
    BadDate { path: String, got: String },
    #[error("expected {expected} at {path}")]
    WrongType { path: String, expected: &'static str },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::MalformedSyntax(_) => "MALFORMED_SYNTAX",
            ParseError::MissingField(_) => "MISSING_FIELD",
            ParseError::UnknownField(_) => "UNKNOWN_FIELD",
            ParseError::BadEnumValue { .. } => "BAD_ENUM_VALUE",
            ParseError::BadDate { .. } => "BAD_DATE",
            ParseError::WrongType { .. } => "WRONG_TYPE",
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            ParseError::MalformedSyntax(_) => None,
            ParseError::MissingField(p) | ParseError::UnknownField(p) => Some(p),
            ParseError::BadEnumValue { path, .. }
            | ParseError::BadDate { path, .. }
            | ParseError::WrongType { path, .. } => Some(path),
        }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// Reads a label document. Only structure is checked here; semantic rules
/// are the job of [`validate_label`](super::validate_label).
pub fn parse_label(bytes: &[u8]) -> Result<Label> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| ParseError::MalformedSyntax(e.to_string()))?;
    label(&value)
}

pub(crate) fn parse_profile_value(value: &Value, path: &str) -> Result<DatasetProfile> {
    profile(value, path)
}

fn escape_pointer(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn wrong(path: impl Into<String>, expected: &'static str) -> ParseError {
    ParseError::WrongType {
        path: path.into(),
        expected,
    }
}

struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Obj<'a> {
    fn new(value: &'a Value, path: &str, allowed: &[&str]) -> Result<Self> {
        let map = value.as_object().ok_or_else(|| wrong(path, "object"))?;
        let mut unknown: Vec<&String> = map
            .keys()
            .filter(|k| !allowed.contains(&k.as_str()))
            .collect();
        unknown.sort();
        if let Some(key) = unknown.first() {
            return Err(ParseError::UnknownField(format!(
                "{path}/{}",
                escape_pointer(key)
            )));
        }
        Ok(Obj {
            map,
            path: path.to_string(),
        })
    }

    fn at(&self, key: &str) -> String {
        format!("{}/{}", self.path, escape_pointer(key))
    }

    fn req(&self, key: &str) -> Result<&'a Value> {
        match self.map.get(key) {
            Some(v) => Ok(v),
            None => Err(ParseError::MissingField(self.at(key))),
        }
    }

    /// Absent and `null` both read as `None`.
    fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn string(&self, key: &str) -> Result<String> {
        let v = self.req(key)?;
        v.as_str()
            .map(str::to_owned)
            .ok_or_else(|| wrong(self.at(key), "string"))
    }

    fn opt_string(&self, key: &str) -> Result<Option<String>> {
        self.opt(key)
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| wrong(self.at(key), "string"))
            })
            .transpose()
    }

    fn u64(&self, key: &str) -> Result<u64> {
        self.req(key)?
            .as_u64()
            .ok_or_else(|| wrong(self.at(key), "nonnegative integer"))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.req(key)?
            .as_f64()
            .ok_or_else(|| wrong(self.at(key), "number"))
    }

    fn list<T>(&self, key: &str, mut item: impl FnMut(&'a Value, &str) -> Result<T>) -> Result<Vec<T>> {
        let path = self.at(key);
        let items = self
            .req(key)?
            .as_array()
            .ok_or_else(|| wrong(path.as_str(), "array"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, v)| item(v, &format!("{path}/{i}")))
            .collect()
    }

    fn date(&self, key: &str) -> Result<NaiveDate> {
        let path = self.at(key);
        let raw = self
            .req(key)?
            .as_str()
            .ok_or_else(|| wrong(path.as_str(), "ISO-8601 date string"))?;
        parse_iso_date(raw).ok_or_else(|| ParseError::BadDate {
            path,
            got: raw.to_string(),
        })
    }
}

/// Strict `YYYY-MM-DD`; anything chrono would accept but print differently is refused.
pub(crate) fn parse_iso_date(raw: &str) -> Option<NaiveDate> {
    let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()?;
    (date.format("%Y-%m-%d").to_string() == raw).then_some(date)
}

fn string_at(value: &Value, path: &str) -> Result<String> {
    value
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| wrong(path, "string"))
}

fn label(value: &Value) -> Result<Label> {
    let o = Obj::new(
        value,
        "",
        &[
            "label_id",
            "schema_version",
            "dataset_name",
            "publisher",
            "source_url",
            "license",
            "date_produced",
            "fingerprint",
            "overview_modules",
            "use_cases",
            "alerts",
            "fyis",
            "questionnaire",
        ],
    )?;
    Ok(Label {
        label_id: o.string("label_id")?,
        schema_version: o.string("schema_version")?,
        dataset_name: o.string("dataset_name")?,
        publisher: o.string("publisher")?,
        source_url: o.opt_string("source_url")?,
        license: o.opt_string("license")?,
        date_produced: o.date("date_produced")?,
        fingerprint: o
            .opt("fingerprint")
            .map(|v| fingerprint(v, &o.at("fingerprint")))
            .transpose()?,
        overview_modules: o.list("overview_modules", overview_module)?,
        use_cases: o.list("use_cases", use_case)?,
        alerts: o.list("alerts", alert)?,
        fyis: o.list("fyis", fyi)?,
        questionnaire: o.list("questionnaire", answer)?,
    })
}

fn fingerprint(value: &Value, path: &str) -> Result<StructuralFingerprint> {
    let o = Obj::new(value, path, &["column_names", "digest"])?;
    Ok(StructuralFingerprint {
        column_names: o.list("column_names", string_at)?,
        digest: o.string("digest")?,
    })
}

fn use_case(value: &Value, path: &str) -> Result<UseCase> {
    let o = Obj::new(value, path, &["id", "title", "description", "predictions"])?;
    Ok(UseCase {
        id: o.string("id")?,
        title: o.string("title")?,
        description: o.string("description")?,
        predictions: o.list("predictions", prediction)?,
    })
}

fn prediction(value: &Value, path: &str) -> Result<Prediction> {
    let o = Obj::new(value, path, &["id", "title", "method_description"])?;
    Ok(Prediction {
        id: o.string("id")?,
        title: o.string("title")?,
        method_description: o.string("method_description")?,
    })
}

fn severity(value: &Value, path: &str) -> Result<Severity> {
    let raw = value.as_str().ok_or_else(|| wrong(path, "severity string"))?;
    Severity::from_color(raw).ok_or_else(|| ParseError::BadEnumValue {
        path: path.to_string(),
        got: raw.to_string(),
    })
}

fn scope(value: &Value, path: &str) -> Result<Scope> {
    let kind_path = format!("{path}/kind");
    let kind = value
        .get("kind")
        .ok_or_else(|| {
            if value.is_object() {
                ParseError::MissingField(kind_path.clone())
            } else {
                wrong(path, "object")
            }
        })?
        .as_str()
        .ok_or_else(|| wrong(kind_path.as_str(), "string"))?;
    match kind {
        "global" => {
            Obj::new(value, path, &["kind"])?;
            Ok(Scope::Global)
        }
        "use_case" => {
            let o = Obj::new(value, path, &["kind", "use_case"])?;
            Ok(Scope::UseCaseWide {
                use_case: o.string("use_case")?,
            })
        }
        "pair" => {
            let o = Obj::new(value, path, &["kind", "use_case", "prediction"])?;
            Ok(Scope::Pair {
                use_case: o.string("use_case")?,
                prediction: o.string("prediction")?,
            })
        }
        other => Err(ParseError::BadEnumValue {
            path: kind_path,
            got: other.to_string(),
        }),
    }
}

fn alert(value: &Value, path: &str) -> Result<Alert> {
    let o = Obj::new(
        value,
        path,
        &[
            "id",
            "title",
            "description",
            "severity",
            "mitigation",
            "scope",
            "derived_from_question",
        ],
    )?;
    Ok(Alert {
        id: o.string("id")?,
        title: o.string("title")?,
        description: o.string("description")?,
        severity: severity(o.req("severity")?, &o.at("severity"))?,
        mitigation: o.opt_string("mitigation")?,
        scope: o.list("scope", scope)?,
        derived_from_question: o.opt_string("derived_from_question")?,
    })
}

fn fyi(value: &Value, path: &str) -> Result<Fyi> {
    let o = Obj::new(
        value,
        path,
        &["id", "title", "description", "scope", "derived_from_question"],
    )?;
    Ok(Fyi {
        id: o.string("id")?,
        title: o.string("title")?,
        description: o.string("description")?,
        scope: o.list("scope", scope)?,
        derived_from_question: o.opt_string("derived_from_question")?,
    })
}

fn answer(value: &Value, path: &str) -> Result<QuestionnaireAnswer> {
    let o = Obj::new(
        value,
        path,
        &["question_id", "category", "question_text", "answer", "flag"],
    )?;
    let category_path = o.at("category");
    let raw_category = o
        .req("category")?
        .as_str()
        .ok_or_else(|| wrong(category_path.as_str(), "string"))?;
    let category = Category::from_name(raw_category).ok_or_else(|| ParseError::BadEnumValue {
        path: category_path,
        got: raw_category.to_string(),
    })?;
    Ok(QuestionnaireAnswer {
        question_id: o.string("question_id")?,
        category,
        question_text: o.string("question_text")?,
        answer: o.string("answer")?,
        flag: o
            .opt("flag")
            .map(|v| flag_rule(v, &o.at("flag")))
            .transpose()?,
    })
}

fn flag_rule(value: &Value, path: &str) -> Result<FlagRule> {
    let o = Obj::new(
        value,
        path,
        &["kind", "severity", "mitigation", "scope", "summary"],
    )?;
    let kind_path = o.at("kind");
    let kind = match o.req("kind")?.as_str() {
        Some("alert") => FlagKind::Alert,
        Some("fyi") => FlagKind::Fyi,
        Some(other) => {
            return Err(ParseError::BadEnumValue {
                path: kind_path,
                got: other.to_string(),
            })
        }
        None => return Err(wrong(kind_path, "string")),
    };
    Ok(FlagRule {
        kind,
        severity: o
            .opt("severity")
            .map(|v| severity(v, &o.at("severity")))
            .transpose()?,
        mitigation: o.opt_string("mitigation")?,
        scope: o.list("scope", scope)?,
        summary: o.string("summary")?,
    })
}

fn overview_module(value: &Value, path: &str) -> Result<OverviewModule> {
    let kind_path = format!("{path}/kind");
    let kind = match value.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(wrong(kind_path, "string")),
        None if value.is_object() => return Err(ParseError::MissingField(kind_path)),
        None => return Err(wrong(path, "object")),
    };
    match kind {
        "key_facts" => {
            let o = Obj::new(value, path, &["kind", "facts"])?;
            let facts_path = o.at("facts");
            let raw = o
                .req("facts")?
                .as_object()
                .ok_or_else(|| wrong(facts_path.as_str(), "object"))?;
            let facts = raw
                .iter()
                .map(|(k, v)| {
                    let p = format!("{facts_path}/{}", escape_pointer(k));
                    Ok((k.clone(), string_at(v, &p)?))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok(OverviewModule::KeyFacts { facts })
        }
        "computed_stats" => {
            let o = Obj::new(value, path, &["kind", "profile"])?;
            Ok(OverviewModule::ComputedStats {
                profile: profile(o.req("profile")?, &o.at("profile"))?,
            })
        }
        "badges" => {
            let o = Obj::new(
                value,
                path,
                &["kind", "use_case_count", "alert_count", "fyi_count"],
            )?;
            Ok(OverviewModule::Badges {
                use_case_count: o.u64("use_case_count")?,
                alert_count: o.u64("alert_count")?,
                fyi_count: o.u64("fyi_count")?,
            })
        }
        "free_text" => {
            let o = Obj::new(value, path, &["kind", "title", "text"])?;
            Ok(OverviewModule::FreeText {
                title: o.string("title")?,
                text: o.string("text")?,
            })
        }
        other => Err(ParseError::BadEnumValue {
            path: kind_path,
            got: other.to_string(),
        }),
    }
}

fn profile(value: &Value, path: &str) -> Result<DatasetProfile> {
    let o = Obj::new(
        value,
        path,
        &["row_count", "columns", "fingerprint", "profiled_at"],
    )?;
    let at_path = o.at("profiled_at");
    let raw_at = o
        .req("profiled_at")?
        .as_str()
        .ok_or_else(|| wrong(at_path.as_str(), "RFC 3339 timestamp"))?;
    let profiled_at = DateTime::parse_from_rfc3339(raw_at)
        .map_err(|_| ParseError::BadDate {
            path: at_path,
            got: raw_at.to_string(),
        })?
        .with_timezone(&Utc);
    Ok(DatasetProfile {
        row_count: o.u64("row_count")?,
        columns: o.list("columns", column)?,
        fingerprint: fingerprint(o.req("fingerprint")?, &o.at("fingerprint"))?,
        profiled_at,
    })
}

fn column(value: &Value, path: &str) -> Result<ColumnProfile> {
    let o = Obj::new(
        value,
        path,
        &[
            "name",
            "inferred_type",
            "missing_count",
            "missing_fraction",
            "distinct_count",
            "min",
            "max",
        ],
    )?;
    let type_path = o.at("inferred_type");
    let raw_type = o
        .req("inferred_type")?
        .as_str()
        .ok_or_else(|| wrong(type_path.as_str(), "string"))?;
    let inferred_type = ColumnType::from_name(raw_type).ok_or_else(|| ParseError::BadEnumValue {
        path: type_path,
        got: raw_type.to_string(),
    })?;
    let bound = |key: &str| -> Result<Option<ColumnBound>> {
        let Some(v) = o.opt(key) else {
            return Ok(None);
        };
        let p = o.at(key);
        let b = match inferred_type {
            ColumnType::Integer => {
                ColumnBound::Integer(v.as_i64().ok_or_else(|| wrong(p.as_str(), "integer"))?)
            }
            ColumnType::Float => {
                ColumnBound::Float(v.as_f64().ok_or_else(|| wrong(p.as_str(), "number"))?)
            }
            ColumnType::Date => {
                let raw = v.as_str().ok_or_else(|| wrong(p.as_str(), "date string"))?;
                ColumnBound::Date(parse_iso_date(raw).ok_or_else(|| ParseError::BadDate {
                    path: p.clone(),
                    got: raw.to_string(),
                })?)
            }
            // min/max only exist for ordered types
            ColumnType::Boolean | ColumnType::String => return Err(ParseError::UnknownField(p)),
        };
        Ok(Some(b))
    };
    Ok(ColumnProfile {
        name: o.string("name")?,
        inferred_type,
        missing_count: o.u64("missing_count")?,
        missing_fraction: o.f64("missing_fraction")?,
        distinct_count: o.u64("distinct_count")?,
        min: bound("min")?,
        max: bound("max")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"label_id":"l1","schema_version":"1.0","dataset_name":"d","publisher":"p","date_produced":"2020-11-01","overview_modules":[],"use_cases":[],"alerts":[],"fyis":[],"questionnaire":[]}"#;

    fn with(patch: impl FnOnce(&mut Map<String, Value>)) -> Vec<u8> {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        patch(v.as_object_mut().unwrap());
        serde_json::to_vec(&v).unwrap()
    }

    #[test]
    fn minimal_document() {
        let label = parse_label(MINIMAL.as_bytes()).unwrap();
        assert_eq!(label.label_id, "l1");
        assert_eq!(label.date_produced, NaiveDate::from_ymd_opt(2020, 11, 1).unwrap());
        assert!(label.use_cases.is_empty());
        assert!(label.fingerprint.is_none());
    }

    #[test]
    fn missing_date_is_reported() {
        let doc = with(|m| {
            m.remove("date_produced");
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::MissingField("/date_produced".into()))
        );
    }

    #[test]
    fn unknown_category_is_bad_enum() {
        let doc = with(|m| {
            m.insert(
                "questionnaire".into(),
                serde_json::json!([{"question_id":"q1","category":"Marketing","question_text":"?","answer":""}]),
            );
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::BadEnumValue {
                path: "/questionnaire/0/category".into(),
                got: "Marketing".into()
            })
        );
    }

    #[test]
    fn fyi_with_severity_key_is_rejected() {
        let doc = with(|m| {
            m.insert(
                "fyis".into(),
                serde_json::json!([{"id":"f1","title":"t","description":"d","scope":[{"kind":"global"}],"severity":"red"}]),
            );
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::UnknownField("/fyis/0/severity".into()))
        );
    }

    #[test]
    fn unknown_top_level_field() {
        let doc = with(|m| {
            m.insert("extra".into(), Value::Bool(true));
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::UnknownField("/extra".into()))
        );
    }

    #[test]
    fn bad_dates() {
        for bad in ["2020-13-01", "2020/11/01", "20-11-01", "2020-1-1", "yesterday"] {
            let doc = with(|m| {
                m.insert("date_produced".into(), Value::String(bad.into()));
            });
            assert_eq!(
                parse_label(&doc),
                Err(ParseError::BadDate {
                    path: "/date_produced".into(),
                    got: bad.into()
                }),
                "{bad}"
            );
        }
    }

    #[test]
    fn malformed_syntax() {
        let err = parse_label(b"{\"label_id\": ").unwrap_err();
        assert_eq!(err.code(), "MALFORMED_SYNTAX");
        assert_eq!(parse_label(b"[]").unwrap_err().code(), "WRONG_TYPE");
    }

    #[test]
    fn bad_severity_and_scope_kind() {
        let doc = with(|m| {
            m.insert(
                "alerts".into(),
                serde_json::json!([{"id":"a","title":"t","description":"d","severity":"green","scope":[{"kind":"global"}]}]),
            );
        });
        assert_eq!(parse_label(&doc).unwrap_err().path(), Some("/alerts/0/severity"));
        let doc = with(|m| {
            m.insert(
                "alerts".into(),
                serde_json::json!([{"id":"a","title":"t","description":"d","severity":"red","scope":[{"kind":"everywhere"}]}]),
            );
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::BadEnumValue {
                path: "/alerts/0/scope/0/kind".into(),
                got: "everywhere".into()
            })
        );
    }

    #[test]
    fn null_optional_reads_as_absent() {
        let doc = with(|m| {
            m.insert("license".into(), Value::Null);
        });
        assert_eq!(parse_label(&doc).unwrap().license, None);
    }

    #[test]
    fn wrong_type_reports_path() {
        let doc = with(|m| {
            m.insert("publisher".into(), Value::from(3));
        });
        assert_eq!(
            parse_label(&doc),
            Err(ParseError::WrongType {
                path: "/publisher".into(),
                expected: "string"
            })
        );
    }
}
