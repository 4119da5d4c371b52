//! One (status, code) per library error.

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use dnl_core::canonical::value_to_canonical_vec;
use dnl_core::{CompareError, ParseError, ProfileError, ResolveError, StalenessError, ValidationReport};
use serde_json::{json, Value};

use crate::store::{StoreError, SubmitError};

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    /// Extra top-level members merged into the body.
    pub extra: Option<serde_json::Map<String, Value>>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            extra: None,
        }
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", what)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", message)
    }

    /// 422 whose body is the validation report plus `code` and `message`.
    pub fn validation_failed(report: &ValidationReport) -> Self {
        let mut extra = match serde_json::to_value(report) {
            Ok(Value::Object(map)) => map,
            _ => serde_json::Map::new(),
        };
        extra.remove("code");
        extra.remove("message");
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: "VALIDATION_FAILED",
            message: format!("label fails validation with {} error(s)", report.error_count()),
            extra: Some(extra),
        }
    }

    pub fn body(&self) -> Vec<u8> {
        let mut body = json!({ "code": self.code, "message": self.message });
        if let (Some(extra), Value::Object(map)) = (&self.extra, &mut body) {
            for (k, v) in extra {
                map.insert(k.clone(), v.clone());
            }
        }
        value_to_canonical_vec(&body)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            [(header::CONTENT_TYPE, "application/json")],
            self.body(),
        )
            .into_response()
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string())
    }
}

impl From<ResolveError> for ApiError {
    fn from(e: ResolveError) -> Self {
        let status = match e {
            ResolveError::UnknownUseCase(_) | ResolveError::UnknownPrediction(_) => StatusCode::NOT_FOUND,
            ResolveError::PredictionNotInUseCase { .. } => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<ProfileError> for ApiError {
    fn from(e: ProfileError) -> Self {
        let status = match e {
            ProfileError::Io(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<StalenessError> for ApiError {
    fn from(e: StalenessError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string())
    }
}

impl From<CompareError> for ApiError {
    fn from(e: CompareError) -> Self {
        let status = match e {
            CompareError::FewerThanTwoLabels | CompareError::EmptyTitle => StatusCode::BAD_REQUEST,
            CompareError::NoLabelMatches(_) => StatusCode::NOT_FOUND,
            CompareError::Resolve { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "STORE_IO", e.to_string())
    }
}

impl From<SubmitError> for ApiError {
    fn from(e: SubmitError) -> Self {
        match e {
            SubmitError::Parse(e) => e.into(),
            SubmitError::Invalid(report) => ApiError::validation_failed(&report),
            SubmitError::DuplicateId(_) => ApiError::new(StatusCode::CONFLICT, "DUPLICATE_ID", e.to_string()),
            SubmitError::Store(e) => e.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnl_core::{validate_label, Label};

    #[test]
    fn body_is_canonical() {
        let e = ApiError::not_found("no label \"x\"");
        assert_eq!(e.body(), br#"{"code":"NOT_FOUND","message":"no label \"x\""}"#);
    }

    #[test]
    fn parse_errors_are_bad_requests() {
        let e: ApiError = dnl_core::parse_label(b"{").unwrap_err().into();
        assert_eq!((e.status, e.code), (StatusCode::BAD_REQUEST, "MALFORMED_SYNTAX"));
    }

    #[test]
    fn validation_body_carries_report() {
        let bytes = br#"{"label_id":"","schema_version":"1.0","dataset_name":"d","publisher":"p",
            "date_produced":"2020-01-01","overview_modules":[],"use_cases":[],"alerts":[],"fyis":[],
            "questionnaire":[]}"#;
        let label: Label = dnl_core::parse_label(bytes).unwrap();
        let e = ApiError::validation_failed(&validate_label(&label));
        let body: Value = serde_json::from_slice(&e.body()).unwrap();
        assert_eq!(body["code"], "VALIDATION_FAILED");
        assert_eq!(body["verdict"], "fail");
        assert_eq!(body["violations"][0]["code"], "EMPTY_LABEL_ID");
    }
}
