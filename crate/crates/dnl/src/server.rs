//! HTTP service over a [`LabelStore`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::{DateTime, Utc};
use dnl_core::canonical::to_canonical_vec;
use dnl_core::{check_staleness, compare_labels_at, list_use_cases, profile_csv_at, resolve, Label};
use serde::Serialize;
use serde_json::json;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};
use tracing::info;

use crate::api_error::ApiError;
use crate::store::{LabelStore, StoredLabel};

/// Largest accepted CSV upload.
pub const MAX_CSV_BYTES: usize = 50 * 1024 * 1024;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(Utc::now)
}

pub struct AppState {
    pub store: LabelStore,
    pub clock: Clock,
}

type Shared = State<Arc<AppState>>;
type ApiResult = Result<Response, ApiError>;

fn json_response(status: StatusCode, bytes: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn canonical<T: Serialize + ?Sized>(value: &T) -> ApiResult {
    let bytes = to_canonical_vec(value)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "ENCODING", e.to_string()))?;
    Ok(json_response(StatusCode::OK, bytes))
}

fn stored(state: &AppState, id: &str) -> Result<Arc<StoredLabel>, ApiError> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::not_found(format!("no label with id {id:?}")))
}

fn param<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    q.get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {name:?}")))
}

fn csv_body(headers: &HeaderMap, body: Result<Bytes, BytesRejection>) -> Result<Bytes, ApiError> {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    let essence = content_type.split(';').next().unwrap_or("").trim();
    if !essence.eq_ignore_ascii_case("text/csv") {
        return Err(ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "UNSUPPORTED_MEDIA_TYPE",
            format!("expected content-type text/csv, got {content_type:?}"),
        ));
    }
    body.map_err(|e| {
        if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::new(
                StatusCode::PAYLOAD_TOO_LARGE,
                "PAYLOAD_TOO_LARGE",
                format!("CSV uploads are limited to {MAX_CSV_BYTES} bytes"),
            )
        } else {
            ApiError::bad_request(e.body_text())
        }
    })
}

async fn list_labels(State(state): Shared) -> ApiResult {
    canonical(&state.store.list())
}

async fn get_label(State(state): Shared, Path(id): Path<String>) -> ApiResult {
    let s = stored(&state, &id)?;
    Ok(json_response(StatusCode::OK, s.canonical.clone()))
}

async fn get_use_cases(State(state): Shared, Path(id): Path<String>) -> ApiResult {
    canonical(&list_use_cases(&stored(&state, &id)?.label))
}

async fn get_resolve(
    State(state): Shared,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let s = stored(&state, &id)?;
    let view = resolve(&s.label, param(&q, "use_case")?, param(&q, "prediction")?)?;
    canonical(&view)
}

async fn post_label(State(state): Shared, body: Result<Bytes, BytesRejection>) -> ApiResult {
    let body = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let id = tokio::task::spawn_blocking(move || state.store.submit(&body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))??;
    let bytes = dnl_core::canonical::value_to_canonical_vec(&json!({ "label_id": id }));
    Ok(json_response(StatusCode::CREATED, bytes))
}

async fn post_profile(
    State(state): Shared,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult {
    let csv = csv_body(&headers, body)?;
    let profile = profile_csv_at(&csv[..], (state.clock)())?;
    Ok(json_response(StatusCode::OK, profile.to_canonical_json()))
}

async fn post_check_staleness(
    State(state): Shared,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult {
    let s = stored(&state, &id)?;
    let csv = csv_body(&headers, body)?;
    let profile = profile_csv_at(&csv[..], (state.clock)())?;
    canonical(&check_staleness(&s.label, &profile)?)
}

async fn get_compare(State(state): Shared, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let title = param(&q, "use_case")?;
    let snapshot = state.store.snapshot();
    let labels = param(&q, "ids")?
        .split(',')
        .filter(|id| !id.is_empty())
        .map(|id| {
            snapshot
                .get(id)
                .map(|s| s.label.clone())
                .ok_or_else(|| ApiError::not_found(format!("no label with id {id:?}")))
        })
        .collect::<Result<Vec<Label>, _>>()?;
    canonical(&compare_labels_at(&labels, title, (state.clock)())?)
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET])
        .allow_headers(Any);
    Router::new()
        .route("/labels", get(list_labels).post(post_label))
        .route("/labels/{id}", get(get_label))
        .route("/labels/{id}/use-cases", get(get_use_cases))
        .route("/labels/{id}/resolve", get(get_resolve))
        .route("/labels/{id}/check-staleness", post(post_check_staleness))
        .route("/profile", post(post_profile))
        .route("/compare", get(get_compare))
        .fallback(fallback)
        .layer(DefaultBodyLimit::max(MAX_CSV_BYTES))
        .layer(cors)
        .with_state(state)
}

/// Serves until `shutdown` completes.
pub async fn serve_on(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let addr: SocketAddr = listener.local_addr()?;
    info!(%addr, labels = state.store.len(), "serving");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
