use chrono::NaiveDate;
use serde::Serialize;

use crate::label::parse_iso_date;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Integer,
    Float,
    Boolean,
    Date,
    String,
}

impl ColumnType {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnType::Integer => "integer",
            ColumnType::Float => "float",
            ColumnType::Boolean => "boolean",
            ColumnType::Date => "date",
            ColumnType::String => "string",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            ColumnType::Integer,
            ColumnType::Float,
            ColumnType::Boolean,
            ColumnType::Date,
            ColumnType::String,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

/// Cells matching one of these (ASCII case-insensitively) count as missing.
pub const MISSING_TOKENS: [&str; 5] = ["", "NA", "N/A", "null", "NaN"];

pub fn is_missing(cell: &str) -> bool {
    MISSING_TOKENS.iter().any(|t| t.eq_ignore_ascii_case(cell))
}

pub(crate) fn parse_integer(s: &str) -> Option<i64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Plain decimal notation with an optional exponent. Rust's own float
/// parser also takes `inf` and `NaN`, which are not numbers here.
pub(crate) fn parse_float(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (mantissa, None),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !frac_part.is_none_or(all_digits) {
        return None;
    }
    if int_part.is_empty() && frac_part.is_none_or(str::is_empty) {
        return None;
    }
    if let Some(exp) = exponent {
        let exp_digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
        if exp_digits.is_empty() || !all_digits(exp_digits) {
            return None;
        }
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn parse_boolean(s: &str) -> Option<bool> {
    if s.eq_ignore_ascii_case("true") {
        Some(true)
    } else if s.eq_ignore_ascii_case("false") {
        Some(false)
    } else {
        None
    }
}

pub(crate) fn parse_date(s: &str) -> Option<NaiveDate> {
    parse_iso_date(s)
}

/// Tracks which types every value seen so far still satisfies.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TypeCandidates {
    pub integer: bool,
    pub float: bool,
    pub boolean: bool,
    pub date: bool,
}

impl Default for TypeCandidates {
    fn default() -> Self {
        TypeCandidates {
            integer: true,
            float: true,
            boolean: true,
            date: true,
        }
    }
}

impl TypeCandidates {
    pub fn resolve(self, seen_any: bool) -> ColumnType {
        if !seen_any {
            ColumnType::String
        } else if self.integer {
            ColumnType::Integer
        } else if self.float {
            ColumnType::Float
        } else if self.boolean {
            ColumnType::Boolean
        } else if self.date {
            ColumnType::Date
        } else {
            ColumnType::String
        }
    }
}

/// Most specific type that every value satisfies, tried in the order
/// integer, float, boolean, date, string. An empty list is `string`.
pub fn infer_column_type<S: AsRef<str>>(non_missing_values: &[S]) -> ColumnType {
    let mut c = TypeCandidates::default();
    for v in non_missing_values {
        let v = v.as_ref();
        c.integer &= parse_integer(v).is_some();
        c.float &= parse_float(v).is_some();
        c.boolean &= parse_boolean(v).is_some();
        c.date &= parse_date(v).is_some();
    }
    c.resolve(!non_missing_values.is_empty())
}
