//! Generic HTTP object store: a blocking client and an axum router that
//! exposes any [`ObjectStore`] with the same wire shape.
//!
//! ```text
//! GET /objects?kind=<kind>        -> ["<id>", ...]
//! GET /objects/<id>               -> payload bytes, x-object-kind, x-created-at
//! PUT /objects/<id>?kind=<kind>   -> {"object_id": "<id>"}
//! ```
//!
//! Errors are JSON `{"code": ..., "message": ...}`. An optional bearer token
//! is checked on every request.

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::object::{object_id, split_id, verify, ObjectKind, ObjectStore, StoreError, StoreResult, StoredObject};

pub const KIND_HEADER: &str = "x-object-kind";
pub const CREATED_HEADER: &str = "x-created-at";
const MAX_BODY: usize = 256 * 1024 * 1024;

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PutResponse {
    pub object_id: String,
}

/// Blocking client for a remote object store.
#[derive(Clone, Debug)]
pub struct HttpStore {
    base: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpStore {
    pub fn new(base_url: &str, token: Option<String>) -> StoreResult<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| StoreError::Rejected(e.to_string()))?;
        Ok(Self {
            base: base_url.trim_end_matches('/').to_string(),
            token,
            client,
        })
    }

    fn send(&self, req: reqwest::blocking::RequestBuilder) -> StoreResult<reqwest::blocking::Response> {
        let req = match &self.token {
            Some(t) => req.bearer_auth(t),
            None => req,
        };
        let resp = req.send().map_err(|e| StoreError::Unavailable(e.to_string()))?;
        if resp.status().is_success() {
            return Ok(resp);
        }
        let status = resp.status();
        let body: Option<ErrorBody> = resp.json().ok();
        let (code, message) = body.map_or((String::new(), status.to_string()), |b| (b.code, b.message));
        Err(match (code.as_str(), status) {
            ("not_found", _) | (_, StatusCode::NOT_FOUND) => StoreError::NotFound(message),
            ("integrity", _) => StoreError::Integrity(message),
            (_, s) if s.is_server_error() || s == StatusCode::TOO_MANY_REQUESTS => StoreError::Unavailable(message),
            _ => StoreError::Rejected(message),
        })
    }
}

impl ObjectStore for HttpStore {
    fn list(&self, kind: ObjectKind) -> StoreResult<Vec<String>> {
        let resp = self.send(self.client.get(format!("{}/objects", self.base)).query(&[("kind", kind.as_str())]))?;
        resp.json().map_err(|e| StoreError::Unavailable(e.to_string()))
    }

    fn fetch(&self, id: &str) -> StoreResult<StoredObject> {
        let resp = self.send(self.client.get(format!("{}/objects/{id}", self.base)))?;
        let header = |name: &str| resp.headers().get(name).and_then(|v| v.to_str().ok()).map(str::to_owned);
        let kind: ObjectKind = header(KIND_HEADER)
            .ok_or_else(|| StoreError::Unavailable("response lacks object kind".into()))?
            .parse()?;
        let created_at = header(CREATED_HEADER).and_then(|v| v.parse().ok()).unwrap_or(0);
        let bytes = resp.bytes().map_err(|e| StoreError::Unavailable(e.to_string()))?.to_vec();
        verify(id, &bytes)?;
        Ok(StoredObject {
            object_id: id.to_string(),
            kind,
            bytes,
            created_at,
        })
    }

    fn put(&self, kind: ObjectKind, name: &str, bytes: &[u8]) -> StoreResult<String> {
        crate::object::validate_put(name, bytes)?;
        let id = object_id(name, bytes);
        let req = self
            .client
            .put(format!("{}/objects/{id}", self.base))
            .query(&[("kind", kind.as_str())])
            .body(bytes.to_vec());
        let resp: PutResponse = self.send(req)?.json().map_err(|e| StoreError::Unavailable(e.to_string()))?;
        Ok(resp.object_id)
    }
}

struct ApiError(StatusCode, &'static str, String);

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let msg = e.to_string();
        match e {
            StoreError::NotFound(_) => ApiError(StatusCode::NOT_FOUND, "not_found", msg),
            StoreError::Integrity(_) => ApiError(StatusCode::UNPROCESSABLE_ENTITY, "integrity", msg),
            StoreError::Unavailable(_) => ApiError(StatusCode::SERVICE_UNAVAILABLE, "unavailable", msg),
            StoreError::Rejected(_) => ApiError(StatusCode::BAD_REQUEST, "rejected", msg),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.1.to_string(),
            message: self.2,
        };
        (self.0, Json(body)).into_response()
    }
}

#[derive(Clone)]
struct ServerState {
    store: Arc<dyn ObjectStore>,
    token: Option<Arc<str>>,
}

#[derive(Deserialize)]
struct KindQuery {
    kind: String,
}

/// Router exposing `store` over HTTP.
pub fn router(store: Arc<dyn ObjectStore>, token: Option<String>) -> Router {
    let state = ServerState {
        store,
        token: token.map(Into::into),
    };
    Router::new()
        .route("/objects", get(list_objects))
        .route("/objects/{id}", get(get_object).put(put_object))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .with_state(state)
}

/// Serves `store` on an already-bound listener until the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, store: Arc<dyn ObjectStore>, token: Option<String>) -> std::io::Result<()> {
    axum::serve(listener, router(store, token)).await
}

async fn require_token(State(state): State<ServerState>, headers: HeaderMap, req: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let presented = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(&**token) {
            return ApiError(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong bearer token".into())
                .into_response();
        }
    }
    next.run(req).await
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> StoreResult<T> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

async fn list_objects(State(s): State<ServerState>, Query(q): Query<KindQuery>) -> Result<Json<Vec<String>>, ApiError> {
    let kind: ObjectKind = q.kind.parse()?;
    Ok(Json(blocking(move || s.store.list(kind)).await?))
}

async fn get_object(State(s): State<ServerState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let obj = blocking(move || s.store.fetch(&id)).await?;
    let mut resp = obj.bytes.into_response();
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/octet-stream"));
    h.insert(KIND_HEADER, HeaderValue::from_static(obj.kind.as_str()));
    h.insert(CREATED_HEADER, HeaderValue::from(obj.created_at));
    Ok(resp)
}

async fn put_object(
    State(s): State<ServerState>,
    Path(id): Path<String>,
    Query(q): Query<KindQuery>,
    body: Bytes,
) -> Result<(StatusCode, Json<PutResponse>), ApiError> {
    let kind: ObjectKind = q.kind.parse()?;
    let Some((_, name)) = split_id(&id) else {
        return Err(StoreError::Rejected(format!("malformed object id {id:?}")).into());
    };
    let name = name.to_string();
    if object_id(&name, &body) != id {
        return Err(StoreError::Integrity(id).into());
    }
    let stored = blocking(move || s.store.put(kind, &name, &body)).await?;
    Ok((StatusCode::CREATED, Json(PutResponse { object_id: stored })))
}
