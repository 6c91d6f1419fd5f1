//! HTTP session service backing the trajectory editor.
//!
//! Each upload opens a session holding one recording, the current plan and
//! the ordered list of actions applied to it. Routes:
//!
//! | method | path | body / query |
//! |---|---|---|
//! | `POST` | `/sessions?format=csv\|jsonl` | raw recording |
//! | `POST` | `/sessions/{id}/actions` | an [`Action`] as JSON |
//! | `GET`  | `/sessions/{id}/state?view=...` | `path`, `waypoints`, `trajectory`, `errors`, `bundle`, `similarity` |
//!
//! The similarity view also takes `reference=<session id|self>` and
//! `at=control|reference`. Errors come back as `{"error": code, "message": text}`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use drawjectory_core::recording::Format;
use drawjectory_core::FeasibilityReport;
use serde::Deserialize;
use serde_json::{json, Value};

mod session;

pub use session::{Action, Session, SessionSnapshot, SessionStore, SimilaritySampling, StopwatchEvent, View};

pub const DEFAULT_HOST: &str = "127.0.0.1";
pub const DEFAULT_PORT: u16 = 7878;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no session with id `{0}`")]
    UnknownSession(String),
    #[error("{0}")]
    InvalidState(String),
    #[error("{0}")]
    ViewUnavailable(String),
    #[error("edited trajectory is infeasible ({} violations)", .0.violations.len())]
    Infeasible(FeasibilityReport),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Core(#[from] drawjectory_core::Error),
}

impl From<serde_json::Error> for ServiceError {
    fn from(e: serde_json::Error) -> Self {
        ServiceError::Core(e.into())
    }
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::InvalidState(_) => "invalid_state",
            ServiceError::ViewUnavailable(_) => "view_unavailable",
            ServiceError::Infeasible(_) => "infeasible",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::Core(e) => e.code(),
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::InvalidState(_) | ServiceError::ViewUnavailable(_) => StatusCode::CONFLICT,
            ServiceError::Infeasible(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::BadRequest(_) | ServiceError::Core(_) => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        if let ServiceError::Infeasible(report) = &self {
            body["feasibility"] = serde_json::to_value(report).unwrap_or(Value::Null);
        }
        (self.status(), Json(body)).into_response()
    }
}

type Shared = Arc<SessionStore>;

#[derive(Debug, Deserialize)]
struct UploadQuery {
    #[serde(default)]
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
struct StateQuery {
    view: String,
    #[serde(default)]
    reference: Option<String>,
    #[serde(default)]
    at: SimilaritySampling,
}

async fn create_session(
    State(store): State<Shared>,
    Query(query): Query<UploadQuery>,
    body: String,
) -> Result<(StatusCode, Json<Value>), ServiceError> {
    let format = match query.format.as_deref() {
        None => Format::Csv,
        Some(name) => name.parse::<Format>()?,
    };
    let id = store.create(body.as_bytes(), format)?;
    log::info!("created session {id}");
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

async fn post_action(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Value>, ServiceError> {
    let action: Action = serde_json::from_str(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    log::debug!("session {id}: {action:?}");
    Ok(Json(store.apply_action(&id, action)?))
}

async fn get_state(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<StateQuery>,
) -> Result<Json<Value>, ServiceError> {
    let view: View = query.view.parse()?;
    Ok(Json(store.get_state(&id, view, query.reference.as_deref(), query.at)?))
}

/// Builds the API router. When `assets` is given, unmatched paths are served
/// from that directory so the editor and the API share one origin.
pub fn router(store: Shared, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/state", get(get_state))
        .with_state(store);
    match assets {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub host: String,
    pub port: u16,
    /// Static files served for paths the API does not handle.
    pub assets: Option<PathBuf>,
    /// Sessions are restored from here at startup and written back on shutdown.
    pub snapshot_dir: Option<PathBuf>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self { host: DEFAULT_HOST.to_string(), port: DEFAULT_PORT, assets: None, snapshot_dir: None }
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(options: ServeOptions) -> Result<(), ServiceError> {
    let io = |e: std::io::Error| ServiceError::Core(e.into());
    let store = Arc::new(match &options.snapshot_dir {
        Some(dir) => SessionStore::load_snapshots(dir)?,
        None => SessionStore::new(),
    });
    if !store.is_empty() {
        log::info!("restored {} sessions", store.len());
    }
    let listener = tokio::net::TcpListener::bind((options.host.as_str(), options.port)).await.map_err(io)?;
    let addr: SocketAddr = listener.local_addr().map_err(io)?;
    log::info!("listening on http://{addr}");
    axum::serve(listener, router(store.clone(), options.assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(io)?;
    if let Some(dir) = &options.snapshot_dir {
        let saved = store.save_snapshots(dir)?;
        log::info!("saved {saved} sessions to {}", dir.display());
    }
    Ok(())
}

/// [`serve`] on a fresh multi-threaded runtime.
pub fn serve_blocking(options: ServeOptions) -> Result<(), ServiceError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Core(e.into()))?;
    runtime.block_on(serve(options))
}
