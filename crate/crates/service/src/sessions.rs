//! Versioned elicitation sessions bound to a node of a stored model.

use qbench_core::elicitation::{check_consistency, derive_capacity, derive_utility_function, Session, Violation};
use qbench_core::mcda::{CriteriaTree, NodeKind};
use serde::{Deserialize, Serialize};

use crate::store::Store;
use crate::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    /// Incremented on every accepted update.
    pub version: u64,
    pub model: String,
    /// Leaf (utility session) or aggregation node (capacity session).
    pub node: String,
    pub session: Session,
    pub feedback: Vec<Violation>,
    pub finalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    pub model: String,
    pub node: String,
    pub session: Session,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateSession {
    /// Version the client last saw; stale updates are rejected.
    pub version: u64,
    pub session: Session,
}

/// Checks that the session kind matches the node it elicits.
fn check_target(tree: &CriteriaTree, node: &str, session: &Session) -> Result<()> {
    let n = tree.node(node)?;
    match (&n.kind, session) {
        (NodeKind::Criterion { utility, .. }, Session::Utility(s)) => {
            if utility.metric_id != s.metric_id {
                return Err(ServiceError::Invalid(format!(
                    "node `{node}` measures `{}`, session elicits `{}`",
                    utility.metric_id, s.metric_id
                )));
            }
        }
        (NodeKind::Aggregation { children, .. }, Session::Capacity(s)) => {
            let mut a = children.clone();
            let mut b = s.children.clone();
            a.sort();
            b.sort();
            if a != b || s.node_id != node {
                return Err(ServiceError::Invalid(format!("capacity session does not match the children of `{node}`")));
            }
        }
        _ => return Err(ServiceError::Invalid(format!("session kind does not fit node `{node}`"))),
    }
    Ok(())
}

pub fn create(store: &Store, req: CreateSession) -> Result<SessionRecord> {
    let tree = store.load_model(&req.model)?;
    check_target(&tree, &req.node, &req.session)?;
    let rec = SessionRecord {
        id: store.next_session_id()?,
        version: 1,
        feedback: check_consistency(&req.session),
        model: req.model,
        node: req.node,
        session: req.session,
        finalized: false,
    };
    store.save_session(&rec)?;
    Ok(rec)
}

pub fn update(store: &Store, id: &str, req: UpdateSession) -> Result<SessionRecord> {
    let mut rec = store.load_session(id)?;
    if rec.finalized {
        return Err(ServiceError::Invalid(format!("session `{id}` is finalized")));
    }
    if req.version != rec.version {
        return Err(ServiceError::Conflict { expected: req.version, current: rec.version });
    }
    check_target(&store.load_model(&rec.model)?, &rec.node, &req.session)?;
    rec.feedback = check_consistency(&req.session);
    rec.session = req.session;
    rec.version += 1;
    store.save_session(&rec)?;
    Ok(rec)
}

/// Builds the model that finalizing `rec` would store, without saving.
pub fn apply_session(tree: &CriteriaTree, node: &str, session: &Session) -> Result<CriteriaTree> {
    check_target(tree, node, session)?;
    let violations = check_consistency(session);
    if !violations.is_empty() {
        return Err(ServiceError::Inconsistent(violations));
    }
    Ok(match session {
        Session::Utility(s) => tree.with_utility(node, derive_utility_function(s)?)?,
        Session::Capacity(s) => tree.with_params(node, derive_capacity(s)?)?,
    })
}

/// Derives the parameters and writes them into the stored model.
pub fn finalize(store: &Store, id: &str, version: u64) -> Result<SessionRecord> {
    let mut rec = store.load_session(id)?;
    if rec.finalized {
        return Err(ServiceError::Invalid(format!("session `{id}` is already finalized")));
    }
    if version != rec.version {
        return Err(ServiceError::Conflict { expected: version, current: rec.version });
    }
    let tree = apply_session(&store.load_model(&rec.model)?, &rec.node, &rec.session)?;
    store.save_model(&rec.model, &tree)?;
    rec.finalized = true;
    rec.version += 1;
    store.save_session(&rec)?;
    Ok(rec)
}
