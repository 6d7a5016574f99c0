//! Plain-file store: append-only record log, model and session documents.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use qbench_core::mcda::CriteriaTree;
use sha2::{Digest, Sha256};

use crate::records::{parse_results, partition_new, BenchmarkRecord, IngestReport, RecordKey};
use crate::sessions::SessionRecord;
use crate::{to_document, Result, ServiceError};

const RECORDS: &str = "records.jsonl";
const MODELS: &str = "models";
const SESSIONS: &str = "sessions";

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(ServiceError::Invalid(format!("{kind} name `{name}` may only use letters, digits, `-` and `_`")))
    }
}

impl Store {
    /// Opens the store at `root`, creating the layout if missing.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join(MODELS))?;
        fs::create_dir_all(root.join(SESSIONS))?;
        let log = root.join(RECORDS);
        if !log.exists() {
            fs::write(&log, "")?;
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn records(&self) -> Result<Vec<BenchmarkRecord>> {
        let text = fs::read_to_string(self.root.join(RECORDS))?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| ServiceError::Schema(format!("{RECORDS} line {}: {e}", i + 1))))
            .collect()
    }

    pub fn record_keys(&self) -> Result<BTreeSet<RecordKey>> {
        Ok(self.records()?.iter().map(BenchmarkRecord::key).collect())
    }

    /// Appends records whose key is new; the rest are reported as duplicates.
    pub fn add_records(&self, incoming: Vec<BenchmarkRecord>) -> Result<IngestReport> {
        for (i, r) in incoming.iter().enumerate() {
            r.validate().map_err(|m| ServiceError::Schema(format!("records[{i}]: {m}")))?;
        }
        let report = partition_new(&self.record_keys()?, incoming);
        if !report.accepted.is_empty() {
            let mut f = OpenOptions::new().append(true).open(self.root.join(RECORDS))?;
            let mut buf = String::new();
            for r in &report.accepted {
                buf.push_str(&serde_json::to_string(r).expect("record serializes"));
                buf.push('\n');
            }
            f.write_all(buf.as_bytes())?;
        }
        Ok(report)
    }

    pub fn ingest(&self, text: &str) -> Result<IngestReport> {
        self.add_records(parse_results(text)?)
    }

    fn model_path(&self, name: &str) -> Result<PathBuf> {
        check_name("model", name)?;
        Ok(self.root.join(MODELS).join(format!("{name}.json")))
    }

    pub fn list_models(&self) -> Result<Vec<String>> {
        let mut names: Vec<String> = fs::read_dir(self.root.join(MODELS))?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".json")).map(String::from))
            .collect();
        names.sort();
        Ok(names)
    }

    pub fn load_model(&self, name: &str) -> Result<CriteriaTree> {
        let path = self.model_path(name)?;
        let text = fs::read_to_string(&path).map_err(|_| ServiceError::NotFound(format!("model `{name}`")))?;
        parse_model(&text)
    }

    pub fn save_model(&self, name: &str, tree: &CriteriaTree) -> Result<()> {
        fs::write(self.model_path(name)?, to_document(tree))?;
        Ok(())
    }

    pub fn delete_model(&self, name: &str) -> Result<()> {
        let path = self.model_path(name)?;
        if !path.exists() {
            return Err(ServiceError::NotFound(format!("model `{name}`")));
        }
        fs::remove_file(path)?;
        Ok(())
    }

    fn session_path(&self, id: &str) -> Result<PathBuf> {
        check_name("session", id)?;
        Ok(self.root.join(SESSIONS).join(format!("{id}.json")))
    }

    pub fn list_sessions(&self) -> Result<Vec<String>> {
        let mut ids: Vec<String> = fs::read_dir(self.root.join(SESSIONS))?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".json")).map(String::from))
            .collect();
        ids.sort();
        Ok(ids)
    }

    /// Next free identifier of the form `s<k>`.
    pub fn next_session_id(&self) -> Result<String> {
        let max = self.list_sessions()?.iter().filter_map(|s| s.strip_prefix('s')?.parse::<u64>().ok()).max().unwrap_or(0);
        Ok(format!("s{}", max + 1))
    }

    pub fn load_session(&self, id: &str) -> Result<SessionRecord> {
        let text = fs::read_to_string(self.session_path(id)?).map_err(|_| ServiceError::NotFound(format!("session `{id}`")))?;
        serde_json::from_str(&text).map_err(|e| ServiceError::Schema(format!("session `{id}`: {e}")))
    }

    pub fn save_session(&self, s: &SessionRecord) -> Result<()> {
        fs::write(self.session_path(&s.id)?, to_document(s))?;
        Ok(())
    }

    /// SHA-256 over every stored file, in path order.
    pub fn state_hash(&self) -> Result<String> {
        let mut files = vec![self.root.join(RECORDS)];
        for dir in [MODELS, SESSIONS] {
            let mut entries: Vec<PathBuf> = fs::read_dir(self.root.join(dir))?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
            entries.sort();
            files.extend(entries);
        }
        let mut h = Sha256::new();
        for f in files {
            h.update(f.strip_prefix(&self.root).unwrap_or(&f).to_string_lossy().as_bytes());
            h.update([0]);
            h.update(fs::read(&f)?);
            h.update([0]);
        }
        Ok(format!("{:x}", h.finalize()))
    }
}

pub fn parse_model(text: &str) -> Result<CriteriaTree> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        ServiceError::Schema(format!("line {}, column {}, at `{}`: {}", inner.line(), inner.column(), e.path(), inner))
    })
}
