//! JSON API over a [`SlotService`], plus an optional static bundle at `/`.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::model::{Navigation, ServiceError, SlotState};
use crate::service::SlotService;

const MAX_IMAGE: usize = 64 * 1024 * 1024;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn unauthorized(message: &str) -> Self {
        Self {
            status: StatusCode::UNAUTHORIZED,
            code: "unauthorized",
            message: message.to_string(),
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match &e {
            ServiceError::UnknownLot(_) | ServiceError::UnknownSlot(_) | ServiceError::NoImage => StatusCode::NOT_FOUND,
            ServiceError::AlreadyReserved(_) | ServiceError::NotReserved(_) => StatusCode::CONFLICT,
            ServiceError::Occupied(_) => StatusCode::PRECONDITION_FAILED,
            ServiceError::Forbidden(_) => StatusCode::FORBIDDEN,
            ServiceError::LengthMismatch { .. } | ServiceError::BadBitString => StatusCode::BAD_REQUEST,
            ServiceError::BadToken => StatusCode::UNAUTHORIZED,
            ServiceError::Config(_) | ServiceError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{e}");
        }
        Self {
            status,
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Router options beyond the service itself.
#[derive(Clone, Debug, Default)]
pub struct ApiOptions {
    /// Directory served at `/` for anything the API does not match.
    pub static_dir: Option<PathBuf>,
    /// Bearer token required to post reports and images. Open when `None`.
    pub ingest_token: Option<String>,
}

#[derive(Clone)]
struct AppState {
    service: Arc<SlotService>,
    ingest_token: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LotSummary {
    pub lot_id: String,
    pub slot_count: usize,
    pub bit_string: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportBody {
    pub bit_string: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReserveAllBody {
    pub reserved: Vec<usize>,
}

pub fn router(service: Arc<SlotService>, options: ApiOptions) -> Router {
    let state = AppState {
        service,
        ingest_token: options.ingest_token,
    };
    let api = Router::new()
        .route("/lots", get(list_lots))
        .route("/lots/{lot}", get(lot_summary))
        .route("/lots/{lot}/slots", get(list_slots))
        .route("/lots/{lot}/slots/{n}", get(one_slot))
        .route("/lots/{lot}/slots/{n}/reserve", post(reserve).delete(release))
        .route("/lots/{lot}/slots/{n}/navigation", get(navigation))
        .route("/lots/{lot}/reserve-all", post(reserve_all))
        .route("/lots/{lot}/report", post(ingest_report))
        .route("/lots/{lot}/annotated", get(annotated).put(put_annotated).post(put_annotated))
        .layer(DefaultBodyLimit::max(MAX_IMAGE))
        .with_state(state);
    match options.static_dir {
        Some(dir) if dir.is_dir() => api.fallback_service(ServeDir::new(dir)),
        Some(dir) => {
            log::warn!("static bundle {} not found; serving the API only", dir.display());
            api
        }
        None => api,
    }
}

pub async fn serve(listener: tokio::net::TcpListener, service: Arc<SlotService>, options: ApiOptions) -> std::io::Result<()> {
    axum::serve(listener, router(service, options)).await
}

/// Like [`serve`], returning once `shutdown` resolves and in-flight
/// requests finish.
pub async fn serve_until(
    listener: tokio::net::TcpListener,
    service: Arc<SlotService>,
    options: ApiOptions,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(service, options))
        .with_graceful_shutdown(shutdown)
        .await
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn client_token(headers: &HeaderMap) -> ApiResult<String> {
    bearer(headers)
        .map(str::to_owned)
        .ok_or_else(|| ApiError::unauthorized("missing bearer client token"))
}

fn check_ingest(state: &AppState, headers: &HeaderMap) -> ApiResult<()> {
    match &state.ingest_token {
        Some(expected) if bearer(headers) != Some(expected.as_str()) => Err(ApiError::unauthorized("bad ingest token")),
        _ => Ok(()),
    }
}

fn slot_number(raw: &str) -> ApiResult<usize> {
    raw.parse().map_err(|_| ApiError {
        status: StatusCode::NOT_FOUND,
        code: "unknown_slot",
        message: format!("no slot {raw:?}"),
    })
}

/// Runs a mutation off the async workers since it may fsync.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: e.to_string(),
        }),
    }
}

fn summary(svc: &SlotService, lot: &str) -> ApiResult<LotSummary> {
    Ok(LotSummary {
        lot_id: lot.to_string(),
        slot_count: svc.config(lot)?.slot_count(),
        bit_string: svc.bit_string(lot)?,
    })
}

async fn list_lots(State(s): State<AppState>) -> ApiResult<Json<Vec<LotSummary>>> {
    let svc = &s.service;
    Ok(Json(svc.lot_ids().iter().map(|id| summary(svc, id)).collect::<ApiResult<_>>()?))
}

async fn lot_summary(State(s): State<AppState>, Path(lot): Path<String>) -> ApiResult<Json<LotSummary>> {
    Ok(Json(summary(&s.service, &lot)?))
}

async fn list_slots(State(s): State<AppState>, Path(lot): Path<String>) -> ApiResult<Json<Vec<SlotState>>> {
    Ok(Json(s.service.slots(&lot)?))
}

async fn one_slot(State(s): State<AppState>, Path((lot, n)): Path<(String, String)>) -> ApiResult<Json<SlotState>> {
    Ok(Json(s.service.slot(&lot, slot_number(&n)?)?))
}

async fn reserve(
    State(s): State<AppState>,
    Path((lot, n)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<Json<SlotState>> {
    let client = client_token(&headers)?;
    let n = slot_number(&n)?;
    Ok(Json(blocking(move || s.service.reserve(&lot, n, &client)).await?))
}

async fn release(
    State(s): State<AppState>,
    Path((lot, n)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<Json<SlotState>> {
    let client = client_token(&headers)?;
    let n = slot_number(&n)?;
    Ok(Json(blocking(move || s.service.release(&lot, n, &client)).await?))
}

async fn reserve_all(State(s): State<AppState>, Path(lot): Path<String>, headers: HeaderMap) -> ApiResult<Json<ReserveAllBody>> {
    let client = client_token(&headers)?;
    let reserved = blocking(move || s.service.reserve_all(&lot, &client)).await?;
    Ok(Json(ReserveAllBody { reserved }))
}

async fn navigation(State(s): State<AppState>, Path((lot, n)): Path<(String, String)>) -> ApiResult<Json<Navigation>> {
    Ok(Json(s.service.navigation(&lot, slot_number(&n)?)?))
}

async fn ingest_report(
    State(s): State<AppState>,
    Path(lot): Path<String>,
    headers: HeaderMap,
    Json(body): Json<ReportBody>,
) -> ApiResult<Json<Vec<SlotState>>> {
    check_ingest(&s, &headers)?;
    Ok(Json(blocking(move || s.service.ingest_report(&lot, &body.bit_string)).await?))
}

async fn put_annotated(
    State(s): State<AppState>,
    Path(lot): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<StatusCode> {
    check_ingest(&s, &headers)?;
    if body.is_empty() {
        return Err(ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "empty_image",
            message: "image body is empty".into(),
        });
    }
    blocking(move || s.service.set_annotated(&lot, body.to_vec())).await?;
    Ok(StatusCode::NO_CONTENT)
}

fn content_type(bytes: &[u8]) -> &'static str {
    match bytes {
        [b'P', b'6', ..] | [b'P', b'3', ..] => "image/x-portable-pixmap",
        [b'P', b'5', ..] | [b'P', b'2', ..] => "image/x-portable-graymap",
        [0x89, b'P', b'N', b'G', ..] => "image/png",
        [0xFF, 0xD8, ..] => "image/jpeg",
        _ => "application/octet-stream",
    }
}

async fn annotated(State(s): State<AppState>, Path(lot): Path<String>) -> ApiResult<Response> {
    let bytes = s.service.annotated(&lot)?;
    let ct = content_type(&bytes);
    Ok(([(header::CONTENT_TYPE, ct), (header::CACHE_CONTROL, "no-store")], bytes.as_ref().clone()).into_response())
}
