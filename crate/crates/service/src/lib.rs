//! Results store, scoring reports and HTTP API on top of `qbench-core`.
//!
//! Everything persisted lives under one store directory: an append-only
//! `records.jsonl`, one JSON file per model under `models/`, and one per
//! elicitation session under `sessions/`. The CLI and the HTTP API share the
//! same functions, so a report rendered by either is the same byte string.

pub mod api;
pub mod bench;
pub mod efficiency;
pub mod records;
pub mod report;
pub mod sessions;
pub mod store;

use qbench_core::elicitation::{ElicitationError, Violation};
use qbench_core::explanation::ExplainError;
use qbench_core::mcda::McdaError;
use qbench_core::opt::OptError;
use qbench_core::sim::SimError;
use thiserror::Error;

/// Environment variable naming the store directory.
pub const STORE_ENV: &str = "QBENCH_STORE";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("version conflict: expected {expected}, current is {current}")]
    Conflict { expected: u64, current: u64 },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("session is inconsistent: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    Inconsistent(Vec<Violation>),
    #[error("storage: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] McdaError),
    #[error(transparent)]
    Elicitation(#[from] ElicitationError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

/// Pretty JSON with a trailing newline; the one serialization used for
/// every document written to disk or returned by the API.
pub fn to_document<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
