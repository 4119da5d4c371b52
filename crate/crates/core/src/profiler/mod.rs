//! CSV ingestion: streaming profile statistics, structural fingerprints,
//! and the staleness check of a label against live data.
//!
//! [`profile_csv`] makes a single pass over the records. Per-column memory
//! is constant apart from the exact distinct-value sets.

mod fingerprint;
mod infer;
mod staleness;

use std::collections::HashSet;
use std::io::Read;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::canonical;
use crate::label::{parse_profile_value, ParseError};

pub use fingerprint::{compute_fingerprint, fingerprint_encoding, FingerprintError, StructuralFingerprint};
pub use infer::{infer_column_type, is_missing, ColumnType, MISSING_TOKENS};
pub use staleness::{check_staleness, StalenessError, StalenessReport, StalenessVerdict};

use infer::{parse_boolean, parse_date, parse_float, parse_integer, TypeCandidates};

/// Minimum or maximum of an ordered column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnBound {
    Integer(i64),
    Float(f64),
    Date(NaiveDate),
}

impl Serialize for ColumnBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ColumnBound::Integer(v) => s.serialize_i64(*v),
            ColumnBound::Float(v) => s.serialize_f64(*v),
            ColumnBound::Date(d) => s.collect_str(&d.format("%Y-%m-%d")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnProfile {
    pub name: String,
    pub inferred_type: ColumnType,
    pub missing_count: u64,
    /// `missing_count / row_count`, or 0 for an empty table.
    pub missing_fraction: f64,
    /// Distinct non-missing values.
    pub distinct_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<ColumnBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<ColumnBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetProfile {
    /// Data records, header excluded.
    pub row_count: u64,
    pub columns: Vec<ColumnProfile>,
    pub fingerprint: StructuralFingerprint,
    #[serde(serialize_with = "serialize_timestamp")]
    pub profiled_at: DateTime<Utc>,
}

fn serialize_timestamp<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_timestamp(ts))
}

/// RFC 3339 in UTC with only as many fractional digits as needed, so the
/// text reparses to the same instant.
pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

impl DatasetProfile {
    /// Canonical `*.profile.json` bytes.
    pub fn to_canonical_json(&self) -> Vec<u8> {
        canonical::to_canonical_vec(self).expect("profile values always encode")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, ParseError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)
            .map_err(|e| ParseError::MalformedSyntax(e.to_string()))?;
        parse_profile_value(&value, "")
    }

    pub fn column(&self, name: &str) -> Option<&ColumnProfile> {
        self.columns.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("input has no header row")]
    EmptyInput,
    #[error("line {line}: expected {expected} fields, found {got}")]
    RaggedRow { line: u64, expected: usize, got: usize },
    #[error("line {line}: invalid UTF-8")]
    EncodingError { line: u64 },
    #[error("read failed: {0}")]
    Io(String),
}

impl ProfileError {
    pub fn code(&self) -> &'static str {
        match self {
            ProfileError::EmptyInput => "EMPTY_INPUT",
            ProfileError::RaggedRow { .. } => "RAGGED_ROW",
            ProfileError::EncodingError { .. } => "ENCODING_ERROR",
            ProfileError::Io(_) => "IO_ERROR",
        }
    }
}

impl From<csv::Error> for ProfileError {
    fn from(e: csv::Error) -> Self {
        ProfileError::Io(e.to_string())
    }
}

#[derive(Default)]
struct ColumnAccumulator {
    missing: u64,
    present: u64,
    distinct: HashSet<String>,
    candidates: TypeCandidates,
    int_range: Option<(i64, i64)>,
    float_range: Option<(f64, f64)>,
    date_range: Option<(NaiveDate, NaiveDate)>,
}

fn widen<T: PartialOrd + Copy>(range: &mut Option<(T, T)>, v: T) {
    match range {
        None => *range = Some((v, v)),
        Some((lo, hi)) => {
            if v < *lo {
                *lo = v;
            }
            if v > *hi {
                *hi = v;
            }
        }
    }
}

impl ColumnAccumulator {
    fn observe(&mut self, cell: &str) {
        if is_missing(cell) {
            self.missing += 1;
            return;
        }
        self.present += 1;
        if !self.distinct.contains(cell) {
            self.distinct.insert(cell.to_owned());
        }
        let c = &mut self.candidates;
        if c.integer {
            match parse_integer(cell) {
                Some(v) => widen(&mut self.int_range, v),
                None => c.integer = false,
            }
        }
        if c.float {
            match parse_float(cell) {
                Some(v) => widen(&mut self.float_range, v),
                None => c.float = false,
            }
        }
        if c.boolean && parse_boolean(cell).is_none() {
            c.boolean = false;
        }
        if c.date {
            match parse_date(cell) {
                Some(v) => widen(&mut self.date_range, v),
                None => c.date = false,
            }
        }
    }

    fn finish(self, name: String, row_count: u64) -> ColumnProfile {
        let inferred_type = self.candidates.resolve(self.present > 0);
        let range = match inferred_type {
            ColumnType::Integer => self
                .int_range
                .map(|(lo, hi)| (ColumnBound::Integer(lo), ColumnBound::Integer(hi))),
            ColumnType::Float => self
                .float_range
                .map(|(lo, hi)| (ColumnBound::Float(lo), ColumnBound::Float(hi))),
            ColumnType::Date => self
                .date_range
                .map(|(lo, hi)| (ColumnBound::Date(lo), ColumnBound::Date(hi))),
            ColumnType::Boolean | ColumnType::String => None,
        };
        ColumnProfile {
            name,
            inferred_type,
            missing_count: self.missing,
            missing_fraction: if row_count == 0 {
                0.0
            } else {
                self.missing as f64 / row_count as f64
            },
            distinct_count: self.distinct.len() as u64,
            min: range.map(|r| r.0),
            max: range.map(|r| r.1),
        }
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input)
}

fn decode_fields(record: &csv::ByteRecord, line: u64) -> Result<Vec<&str>, ProfileError> {
    record
        .iter()
        .map(|f| std::str::from_utf8(f).map_err(|_| ProfileError::EncodingError { line }))
        .collect()
}

fn read_header<R: Read>(
    reader: &mut csv::Reader<R>,
    record: &mut csv::ByteRecord,
) -> Result<Vec<String>, ProfileError> {
    if !reader.read_byte_record(record)? {
        return Err(ProfileError::EmptyInput);
    }
    let line = record.position().map_or(1, |p| p.line());
    let mut names: Vec<String> = decode_fields(record, line)?
        .into_iter()
        .map(str::to_owned)
        .collect();
    if let Some(first) = names.first_mut() {
        if let Some(stripped) = first.strip_prefix('\u{feff}') {
            *first = stripped.to_owned();
        }
    }
    Ok(names)
}

/// Profiles a CSV stream, stamping the result with the current time.
pub fn profile_csv<R: Read>(input: R) -> Result<DatasetProfile, ProfileError> {
    profile_csv_at(input, Utc::now())
}

/// Profiles a CSV stream with a caller-chosen `profiled_at`.
///
/// The first record is the header. Every later record must have the same
/// number of fields; ragged rows are errors and never repaired.
pub fn profile_csv_at<R: Read>(
    input: R,
    profiled_at: DateTime<Utc>,
) -> Result<DatasetProfile, ProfileError> {
    let mut reader = csv_reader(input);
    let mut record = csv::ByteRecord::new();
    let names = read_header(&mut reader, &mut record)?;
    let fingerprint = compute_fingerprint(&names).map_err(|_| ProfileError::EmptyInput)?;

    let mut columns: Vec<ColumnAccumulator> =
        names.iter().map(|_| ColumnAccumulator::default()).collect();
    let mut row_count = 0u64;
    while reader.read_byte_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != names.len() {
            return Err(ProfileError::RaggedRow {
                line,
                expected: names.len(),
                got: record.len(),
            });
        }
        for (acc, cell) in columns.iter_mut().zip(decode_fields(&record, line)?) {
            acc.observe(cell);
        }
        row_count += 1;
    }

    Ok(DatasetProfile {
        row_count,
        columns: names
            .into_iter()
            .zip(columns)
            .map(|(name, acc)| acc.finish(name, row_count))
            .collect(),
        fingerprint,
        profiled_at,
    })
}

/// Fingerprint of a CSV stream's header row; the body is not read.
pub fn fingerprint_csv<R: Read>(input: R) -> Result<StructuralFingerprint, ProfileError> {
    let mut reader = csv_reader(input);
    let mut record = csv::ByteRecord::new();
    let names = read_header(&mut reader, &mut record)?;
    compute_fingerprint(&names).map_err(|_| ProfileError::EmptyInput)
}
