//! Benchmark records and the results document accepted by `ingest`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Utc};
use qbench_core::SCHEMA_VERSION;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

/// Metric names with fixed meaning across families.
pub const WALL_CLOCK: &str = "wall_clock_seconds";
pub const ENERGY: &str = "energy_joules";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Local,
    /// External result; `source` cites where the number comes from.
    Ingested { source: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub alternative_id: String,
    pub family: String,
    pub instance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub metrics: BTreeMap<String, f64>,
    pub timestamp: DateTime<Utc>,
    pub provenance: Provenance,
}

/// Identity used for duplicate detection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub alternative_id: String,
    pub family: String,
    pub instance: String,
    pub seed: Option<u64>,
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.alternative_id, self.family, self.instance)?;
        if let Some(s) = self.seed {
            write!(f, "/seed={s}")?;
        }
        Ok(())
    }
}

impl BenchmarkRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            alternative_id: self.alternative_id.clone(),
            family: self.family.clone(),
            instance: self.instance.clone(),
            seed: self.seed,
        }
    }

    /// Checks the field-level invariants; errors name the offending field.
    pub fn validate(&self) -> Result<(), String> {
        for (field, v) in [("alternative_id", &self.alternative_id), ("family", &self.family), ("instance", &self.instance)] {
            if v.trim().is_empty() {
                return Err(format!("{field} must not be empty"));
            }
        }
        if self.family.contains('.') {
            return Err(format!("family `{}` must not contain `.`", self.family));
        }
        for (name, &v) in &self.metrics {
            if !v.is_finite() {
                return Err(format!("metrics.{name} = {v} is not finite"));
            }
        }
        if let Some(&w) = self.metrics.get(WALL_CLOCK) {
            if w < 0.0 {
                return Err(format!("metrics.{WALL_CLOCK} = {w} is negative"));
            }
        }
        if let Some(&e) = self.metrics.get(ENERGY) {
            if e <= 0.0 {
                return Err(format!("metrics.{ENERGY} = {e} must be positive"));
            }
        }
        if let Provenance::Ingested { source } = &self.provenance {
            if source.trim().is_empty() {
                return Err("provenance.source must cite where an ingested result comes from".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub records: Vec<BenchmarkRecord>,
}

impl ResultsDocument {
    pub fn new(records: Vec<BenchmarkRecord>) -> Self {
        Self { schema_version: SCHEMA_VERSION, records }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: Vec<BenchmarkRecord>,
    /// Records rejected because their key already exists in the store or
    /// earlier in the same document.
    pub duplicates: Vec<RecordKey>,
}

/// Parses a results document. Errors carry the JSON path and position of
/// the first offending field. Blank input is an empty document.
pub fn parse_results(text: &str) -> Result<Vec<BenchmarkRecord>, ServiceError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ResultsDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        ServiceError::Schema(format!("line {}, column {}, at `{}`: {}", inner.line(), inner.column(), e.path(), inner))
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ServiceError::Schema(format!(
            "schema_version {} is not supported, expected {SCHEMA_VERSION}",
            doc.schema_version
        )));
    }
    for (i, r) in doc.records.iter().enumerate() {
        r.validate().map_err(|m| ServiceError::Schema(format!("records[{i}]: {m}")))?;
    }
    Ok(doc.records)
}

/// Splits `incoming` into new records and duplicates of `existing` keys or
/// of each other.
pub fn partition_new(existing: &BTreeSet<RecordKey>, incoming: Vec<BenchmarkRecord>) -> IngestReport {
    let mut seen = existing.clone();
    let mut report = IngestReport::default();
    for r in incoming {
        if seen.insert(r.key()) {
            report.accepted.push(r);
        } else {
            report.duplicates.push(r.key());
        }
    }
    report
}
