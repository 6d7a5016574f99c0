//! HTTP API. Handlers call the same functions as the CLI and answer with
//! the same document bytes.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use qbench_core::explanation::ReferenceKind;
use qbench_core::par::Execution;
use qbench_core::SCHEMA_VERSION;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::RwLock;

use crate::records::ResultsDocument;
use crate::report::{apply_overrides, evaluate_and_report, explain_in_store, render_markdown, score_store, Override};
use crate::sessions::{self, CreateSession, UpdateSession};
use crate::store::{parse_model, Store};
use crate::{to_document, ServiceError};

type Shared = Arc<RwLock<Store>>;

pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

pub fn status_of(e: &ServiceError) -> StatusCode {
    match e {
        ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
        ServiceError::Conflict { .. } => StatusCode::CONFLICT,
        ServiceError::Schema(_) => StatusCode::BAD_REQUEST,
        ServiceError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.0.to_string() });
        if let ServiceError::Inconsistent(v) = &self.0 {
            body["violations"] = json!(v);
        }
        (status_of(&self.0), document(&body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn document<T: Serialize>(value: &T) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], to_document(value)).into_response()
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        ServiceError::Schema(format!("line {}, column {}, at `{}`: {}", inner.line(), inner.column(), e.path(), inner))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluateRequest {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explain: Option<ReferenceKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplainRequest {
    pub model: String,
    pub alternative: String,
    pub reference: ReferenceKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhatIfRequest {
    pub model: String,
    #[serde(default)]
    pub overrides: Vec<Override>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explain: Option<ReferenceKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinalizeRequest {
    pub version: u64,
}

#[derive(Debug, Default, Deserialize)]
pub struct FormatQuery {
    #[serde(default)]
    pub format: Option<String>,
}

pub fn router(store: Store) -> Router {
    let state: Shared = Arc::new(RwLock::new(store));
    Router::new()
        .route("/health", get(health))
        .route("/models", get(list_models))
        .route("/models/:name", get(get_model).put(put_model).delete(delete_model))
        .route("/records", get(get_records).post(post_records))
        .route("/evaluate", post(evaluate))
        .route("/explain", post(explain))
        .route("/whatif", post(whatif))
        .route("/sessions", get(list_sessions).post(create_session))
        .route("/sessions/:id", get(get_session).put(put_session))
        .route("/sessions/:id/consistency", get(session_consistency))
        .route("/sessions/:id/finalize", post(finalize_session))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(store: Store, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health() -> Response {
    document(&json!({ "status": "ok", "schema_version": SCHEMA_VERSION }))
}

async fn list_models(State(s): State<Shared>) -> ApiResult {
    Ok(document(&s.read().await.list_models()?))
}

async fn get_model(State(s): State<Shared>, Path(name): Path<String>) -> ApiResult {
    Ok(document(&s.read().await.load_model(&name)?))
}

async fn put_model(State(s): State<Shared>, Path(name): Path<String>, body: Bytes) -> ApiResult {
    let text = std::str::from_utf8(&body).map_err(|e| ServiceError::Schema(e.to_string()))?;
    let tree = parse_model(text)?;
    s.write().await.save_model(&name, &tree)?;
    Ok(document(&tree))
}

async fn delete_model(State(s): State<Shared>, Path(name): Path<String>) -> ApiResult {
    s.write().await.delete_model(&name)?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn get_records(State(s): State<Shared>) -> ApiResult {
    Ok(document(&ResultsDocument::new(s.read().await.records()?)))
}

async fn post_records(State(s): State<Shared>, body: Bytes) -> ApiResult {
    let text = std::str::from_utf8(&body).map_err(|e| ServiceError::Schema(e.to_string()))?;
    Ok(document(&s.write().await.ingest(text)?))
}

async fn evaluate(State(s): State<Shared>, Query(q): Query<FormatQuery>, body: Bytes) -> ApiResult {
    let req: EvaluateRequest = parse(&body)?;
    let store = s.read().await;
    let report = score_store(&store, &req.model, req.explain, Execution::default())?;
    match q.format.as_deref() {
        None | Some("json") => Ok(document(&report)),
        Some("md") => {
            let tree = store.load_model(&req.model)?;
            Ok(([(header::CONTENT_TYPE, "text/markdown")], render_markdown(&report, &tree)).into_response())
        }
        Some(f) => Err(ServiceError::Invalid(format!("unknown format `{f}`, expected json or md")).into()),
    }
}

async fn explain(State(s): State<Shared>, body: Bytes) -> ApiResult {
    let req: ExplainRequest = parse(&body)?;
    Ok(document(&explain_in_store(&*s.read().await, &req.model, &req.alternative, req.reference)?))
}

async fn whatif(State(s): State<Shared>, body: Bytes) -> ApiResult {
    let req: WhatIfRequest = parse(&body)?;
    let store = s.read().await;
    let tree = apply_overrides(&store.load_model(&req.model)?, &req.overrides)?;
    let (profiles, excluded) = crate::report::build_profiles(&tree, &store.records()?);
    Ok(document(&evaluate_and_report(&req.model, &tree, profiles, excluded, req.explain, Execution::default())?))
}

async fn list_sessions(State(s): State<Shared>) -> ApiResult {
    Ok(document(&s.read().await.list_sessions()?))
}

async fn create_session(State(s): State<Shared>, body: Bytes) -> ApiResult {
    let req: CreateSession = parse(&body)?;
    let rec = sessions::create(&*s.write().await, req)?;
    let mut resp = document(&rec);
    *resp.status_mut() = StatusCode::CREATED;
    Ok(resp)
}

async fn get_session(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    Ok(document(&s.read().await.load_session(&id)?))
}

async fn put_session(State(s): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: UpdateSession = parse(&body)?;
    Ok(document(&sessions::update(&*s.write().await, &id, req)?))
}

async fn session_consistency(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let rec = s.read().await.load_session(&id)?;
    Ok(document(&json!({ "id": rec.id, "version": rec.version, "consistent": rec.feedback.is_empty(), "violations": rec.feedback })))
}

async fn finalize_session(State(s): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: FinalizeRequest = parse(&body)?;
    Ok(document(&sessions::finalize(&*s.write().await, &id, req.version)?))
}
