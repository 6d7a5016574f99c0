//! Hierarchical multi-criteria model.
//!
//! A [`CriteriaTree`] has [`UtilityFunction`] leaves that normalise raw metric
//! values onto the unipolar scale `[0, +inf)` (Bad level at 0, Good level
//! at 1) and [`ChoquetParams`] internal nodes that aggregate child scores with
//! a 2-additive Choquet integral. Evaluation is bottom-up and pure.

mod choquet;
mod evaluate;
mod tree;
mod utility;

pub use choquet::{ChildPair, ChoquetParams, Interpretation, SUM_TOLERANCE};
pub use evaluate::{
    evaluate_interval, evaluate_many, evaluate_tree, EvaluationResult, Interval, IntervalEvaluation,
    MeasurementProfile,
};
pub use tree::{CriteriaTree, Node, NodeKind, RecordAggregation};
pub use utility::{Breakpoint, Direction, UtilityFunction};

use thiserror::Error;

pub type NodeId = String;
pub type MetricId = String;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McdaError {
    #[error("metric `{metric}`: value {value} is not finite")]
    NonFiniteValue { metric: MetricId, value: f64 },
    #[error("utility function for `{metric}`: {reason}")]
    InvalidUtility { metric: MetricId, reason: String },
    #[error("choquet parameters{}: {reason}", node_suffix(.node))]
    InvalidParams { node: Option<NodeId>, reason: String },
    #[error("missing input for child `{0}`")]
    MissingInput(NodeId),
    #[error("unexpected input for `{0}`, not a child of this node")]
    UnexpectedInput(NodeId),
    #[error("input for child `{child}` must be finite and non-negative, got {value}")]
    InvalidInput { child: NodeId, value: f64 },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("alternative `{alternative}` has no value for metric `{metric}`")]
    MissingMetric { alternative: String, metric: MetricId },
    #[error("metric `{metric}`: interval [{lo}, {hi}] is invalid")]
    InvalidInterval { metric: MetricId, lo: f64, hi: f64 },
    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("node `{node}`: {source}")]
    AtNode {
        node: NodeId,
        #[source]
        source: Box<McdaError>,
    },
}

fn node_suffix(node: &Option<NodeId>) -> String {
    node.as_ref().map(|n| format!(" at node `{n}`")).unwrap_or_default()
}

impl McdaError {
    pub(crate) fn at(self, node: &str) -> Self {
        match self {
            McdaError::InvalidParams { node: None, reason } => {
                McdaError::InvalidParams { node: Some(node.to_string()), reason }
            }
            e @ McdaError::AtNode { .. } => e,
            e => McdaError::AtNode { node: node.to_string(), source: Box::new(e) },
        }
    }
}

pub type Result<T, E = McdaError> = std::result::Result<T, E>;
