use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ChoquetParams, McdaError, MetricId, NodeId, Result, UtilityFunction};
use crate::SCHEMA_VERSION;

/// How repeated benchmark records of one metric are folded into a single
/// profile value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordAggregation {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeKind {
    Criterion {
        utility: UtilityFunction,
        #[serde(default)]
        record_aggregation: RecordAggregation,
    },
    Aggregation {
        children: Vec<NodeId>,
        params: ChoquetParams,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn criterion(id: impl Into<NodeId>, label: impl Into<String>, utility: UtilityFunction) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind: NodeKind::Criterion { utility, record_aggregation: RecordAggregation::Mean },
        }
    }

    pub fn aggregation(id: impl Into<NodeId>, label: impl Into<String>, children: Vec<NodeId>, params: ChoquetParams) -> Self {
        Self { id: id.into(), label: label.into(), kind: NodeKind::Aggregation { children, params } }
    }

    pub fn with_record_aggregation(mut self, rule: RecordAggregation) -> Self {
        if let NodeKind::Criterion { record_aggregation, .. } = &mut self.kind {
            *record_aggregation = rule;
        }
        self
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Criterion { .. })
    }

    pub fn children(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Criterion { .. } => &[],
            NodeKind::Aggregation { children, .. } => children,
        }
    }

    pub fn utility(&self) -> Option<&UtilityFunction> {
        match &self.kind {
            NodeKind::Criterion { utility, .. } => Some(utility),
            NodeKind::Aggregation { .. } => None,
        }
    }

    pub fn params(&self) -> Option<&ChoquetParams> {
        match &self.kind {
            NodeKind::Aggregation { params, .. } => Some(params),
            NodeKind::Criterion { .. } => None,
        }
    }
}

/// Serialized form of a [`CriteriaTree`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeDocument {
    schema_version: u32,
    scope_label: String,
    root: NodeId,
    nodes: Vec<Node>,
}

/// A validated criteria hierarchy.
///
/// Nodes keep their document order for display; lookups go through an index
/// built at construction. A tree is immutable once built; the `with_*`
/// methods return modified copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeDocument", into = "TreeDocument")]
pub struct CriteriaTree {
    scope_label: String,
    root: NodeId,
    nodes: Vec<Node>,
    index: BTreeMap<NodeId, usize>,
    parent: BTreeMap<NodeId, NodeId>,
    /// Children before parents.
    postorder: Vec<usize>,
}

impl TryFrom<TreeDocument> for CriteriaTree {
    type Error = McdaError;

    fn try_from(doc: TreeDocument) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(McdaError::SchemaVersion { found: doc.schema_version, expected: SCHEMA_VERSION });
        }
        CriteriaTree::new(doc.scope_label, doc.root, doc.nodes)
    }
}

impl From<CriteriaTree> for TreeDocument {
    fn from(t: CriteriaTree) -> Self {
        TreeDocument { schema_version: SCHEMA_VERSION, scope_label: t.scope_label, root: t.root, nodes: t.nodes }
    }
}

impl CriteriaTree {
    pub fn new(scope_label: impl Into<String>, root: impl Into<NodeId>, nodes: Vec<Node>) -> Result<Self> {
        let root = root.into();
        let bad = |msg: String| McdaError::InvalidTree(msg);

        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(bad(format!("node #{i} has an empty identifier")));
            }
            if index.insert(n.id.clone(), i).is_some() {
                return Err(bad(format!("duplicate node identifier `{}`", n.id)));
            }
        }
        if !index.contains_key(&root) {
            return Err(bad(format!("root `{root}` is not a node")));
        }

        let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for n in &nodes {
            match &n.kind {
                NodeKind::Criterion { utility, .. } => utility.validate().map_err(|e| e.at(&n.id))?,
                NodeKind::Aggregation { children, params } => {
                    if children.is_empty() {
                        return Err(bad(format!("aggregation node `{}` has no children", n.id)));
                    }
                    let mut seen = BTreeSet::new();
                    for c in children {
                        if !seen.insert(c) {
                            return Err(bad(format!("node `{}` lists child `{c}` twice", n.id)));
                        }
                        if !index.contains_key(c) {
                            return Err(bad(format!("node `{}` references unknown child `{c}`", n.id)));
                        }
                        if *c == root {
                            return Err(bad(format!("root `{root}` cannot be a child of `{}`", n.id)));
                        }
                        if let Some(prev) = parent.insert(c.clone(), n.id.clone()) {
                            return Err(bad(format!("node `{c}` has two parents: `{prev}` and `{}`", n.id)));
                        }
                    }
                    let param_children: BTreeSet<&NodeId> = params.children().collect();
                    if param_children != seen {
                        return Err(McdaError::InvalidParams {
                            node: Some(n.id.clone()),
                            reason: "singleton weights must list exactly the node's children".into(),
                        });
                    }
                    params.validate().map_err(|e| e.at(&n.id))?;
                }
            }
        }

        // Every node must hang below the root; with unique parents this also
        // rules out cycles.
        let mut postorder = Vec::with_capacity(nodes.len());
        let mut stack = vec![(index[&root], false)];
        while let Some((i, expanded)) = stack.pop() {
            if expanded {
                postorder.push(i);
                continue;
            }
            stack.push((i, true));
            for c in nodes[i].children().iter().rev() {
                stack.push((index[c], false));
            }
        }
        if postorder.len() != nodes.len() {
            let reached: BTreeSet<usize> = postorder.iter().copied().collect();
            let orphan = (0..nodes.len()).find(|i| !reached.contains(i)).expect("some node unreached");
            return Err(bad(format!("node `{}` is not reachable from the root", nodes[orphan].id)));
        }

        Ok(Self { scope_label: scope_label.into(), root, nodes, index, parent, postorder })
    }

    pub fn scope_label(&self) -> &str {
        &self.scope_label
    }

    pub fn root_id(&self) -> &str {
        &self.root
    }

    pub fn root(&self) -> &Node {
        &self.nodes[self.index[&self.root]]
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i]).ok_or_else(|| McdaError::UnknownNode(id.to_string()))
    }

    /// Nodes in document order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn parent(&self, id: &str) -> Option<&str> {
        self.parent.get(id).map(String::as_str)
    }

    /// Nodes ordered children-before-parents.
    pub fn postorder(&self) -> impl Iterator<Item = &Node> {
        self.postorder.iter().map(|&i| &self.nodes[i])
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.postorder().filter(|n| n.is_leaf())
    }

    pub fn depth(&self, id: &str) -> usize {
        let mut d = 0;
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// Metric identifiers referenced by the leaves, deduplicated.
    pub fn metric_ids(&self) -> BTreeSet<&MetricId> {
        self.leaves().filter_map(|n| n.utility()).map(|u| &u.metric_id).collect()
    }

    /// Record aggregation rule declared for `metric`. Leaves sharing a metric
    /// must agree; the first declaration wins otherwise.
    pub fn record_aggregation(&self, metric: &str) -> Option<RecordAggregation> {
        self.nodes.iter().find_map(|n| match &n.kind {
            NodeKind::Criterion { utility, record_aggregation } if utility.metric_id == metric => Some(*record_aggregation),
            _ => None,
        })
    }

    /// Copy of the tree with the Choquet parameters of `node` replaced.
    pub fn with_params(&self, node: &str, params: ChoquetParams) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let i = *self.index.get(node).ok_or_else(|| McdaError::UnknownNode(node.to_string()))?;
        match &mut nodes[i].kind {
            NodeKind::Aggregation { params: p, .. } => *p = params,
            NodeKind::Criterion { .. } => {
                return Err(McdaError::InvalidTree(format!("`{node}` is a criterion, not an aggregation node")))
            }
        }
        Self::new(self.scope_label.clone(), self.root.clone(), nodes)
    }

    /// Copy of the tree with the utility function of criterion `node` replaced.
    pub fn with_utility(&self, node: &str, utility: UtilityFunction) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let i = *self.index.get(node).ok_or_else(|| McdaError::UnknownNode(node.to_string()))?;
        match &mut nodes[i].kind {
            NodeKind::Criterion { utility: u, .. } => *u = utility,
            NodeKind::Aggregation { .. } => {
                return Err(McdaError::InvalidTree(format!("`{node}` is an aggregation node, not a criterion")))
            }
        }
        Self::new(self.scope_label.clone(), self.root.clone(), nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcda::Direction;

    fn leaf(id: &str) -> Node {
        let u = UtilityFunction::from_pairs(id, Direction::HigherIsBetter, &[(0.0, 0.0), (10.0, 1.0)]).unwrap();
        Node::criterion(id, id, u)
    }

    fn agg(id: &str, children: &[&str]) -> Node {
        let w = 1.0 / children.len() as f64;
        let params = ChoquetParams::weighted_sum(children.iter().map(|c| (*c, w))).unwrap();
        Node::aggregation(id, id, children.iter().map(|c| c.to_string()).collect(), params)
    }

    #[test]
    fn builds_nested_tree() {
        let t = CriteriaTree::new("annealers", "r", vec![agg("r", &["a", "g"]), leaf("a"), agg("g", &["b", "c"]), leaf("b"), leaf("c")])
            .unwrap();
        let order: Vec<&str> = t.postorder().map(|n| n.id.as_str()).collect();
        assert_eq!(order, ["a", "b", "c", "g", "r"]);
        assert_eq!(t.parent("b"), Some("g"));
        assert_eq!(t.depth("c"), 2);
        assert_eq!(t.metric_ids().len(), 3);
    }

    #[test]
    fn rejects_structural_errors() {
        let dup = CriteriaTree::new("s", "r", vec![agg("r", &["a"]), leaf("a"), leaf("a")]);
        assert!(matches!(dup, Err(McdaError::InvalidTree(_))));
        let orphan = CriteriaTree::new("s", "r", vec![agg("r", &["a"]), leaf("a"), leaf("b")]);
        assert!(orphan.unwrap_err().to_string().contains("`b` is not reachable"));
        let two_parents =
            CriteriaTree::new("s", "r", vec![agg("r", &["g", "h"]), agg("g", &["a"]), agg("h", &["a"]), leaf("a")]);
        assert!(two_parents.unwrap_err().to_string().contains("two parents"));
        let cycle = CriteriaTree::new("s", "r", vec![agg("r", &["a"]), leaf("a"), agg("x", &["y"]), agg("y", &["x"])]);
        assert!(cycle.is_err());
        let missing_root = CriteriaTree::new("s", "q", vec![leaf("a")]);
        assert!(missing_root.is_err());
        let unknown_child = CriteriaTree::new("s", "r", vec![agg("r", &["a", "z"]), leaf("a")]);
        assert!(unknown_child.is_err());
    }

    #[test]
    fn params_must_match_children() {
        let params = ChoquetParams::weighted_sum([("a", 1.0)]).unwrap();
        let n = Node::aggregation("r", "r", vec!["a".into(), "b".into()], params);
        let err = CriteriaTree::new("s", "r", vec![n, leaf("a"), leaf("b")]).unwrap_err();
        assert!(matches!(err, McdaError::InvalidParams { node: Some(ref id), .. } if id == "r"), "{err}");
    }

    #[test]
    fn document_round_trip_is_identical() {
        let t = CriteriaTree::new("qpu", "r", vec![agg("r", &["a", "b"]), leaf("a"), leaf("b")]).unwrap();
        let json = serde_json::to_string_pretty(&t).unwrap();
        let back: CriteriaTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), json);
        let wrong_version = json.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(serde_json::from_str::<CriteriaTree>(&wrong_version).is_err());
    }

    #[test]
    fn overrides_return_validated_copies() {
        let t = CriteriaTree::new("s", "r", vec![agg("r", &["a", "b"]), leaf("a"), leaf("b")]).unwrap();
        let p = ChoquetParams::weighted_sum([("a", 0.9), ("b", 0.1)]).unwrap();
        let t2 = t.with_params("r", p.clone()).unwrap();
        assert_eq!(t2.root().params(), Some(&p));
        assert!(t.with_params("a", p).is_err());
        let broken = ChoquetParams::weighted_sum([("a", 1.0)]).unwrap();
        assert!(t.with_params("r", broken).is_err());
    }
}
