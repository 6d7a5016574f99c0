//! Contrastive explanations of a score against a reference alternative.
//!
//! At each aggregation node the score difference between the alternative
//! and the reference is split among the children with the exact Shapley
//! value of the game `v(S) = F(x on S, r elsewhere) - F(r)`. Below the root,
//! a child's share is passed down to its own children in proportion to their
//! local Shapley values, so every level adds up to the parent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcda::{evaluate_tree, ChoquetParams, CriteriaTree, McdaError, MeasurementProfile, MetricId, NodeId, NodeKind};

/// Exact enumeration visits `2^n` coalitions per node.
pub const MAX_SHAPLEY_ARITY: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExplainError {
    #[error("node has {0} children; exact Shapley values are limited to {MAX_SHAPLEY_ARITY}")]
    TooManyChildren(usize),
    #[error("an ideal reference needs a non-empty evaluation set")]
    EmptyEvaluationSet,
    #[error(transparent)]
    Model(#[from] McdaError),
}

pub type Result<T, E = ExplainError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Bad level on every metric.
    Worst,
    /// Best observed value on every metric across the evaluated alternatives.
    Ideal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub kind: ReferenceKind,
    pub values: BTreeMap<MetricId, f64>,
}

impl ReferenceProfile {
    pub fn as_profile(&self) -> MeasurementProfile {
        let name = match self.kind {
            ReferenceKind::Worst => "reference:worst",
            ReferenceKind::Ideal => "reference:ideal",
        };
        MeasurementProfile { alternative_id: name.into(), values: self.values.clone(), intervals: BTreeMap::new() }
    }
}

pub fn reference_profile(
    kind: ReferenceKind,
    tree: &CriteriaTree,
    evaluation_set: &[MeasurementProfile],
) -> Result<ReferenceProfile> {
    let mut values = BTreeMap::new();
    match kind {
        ReferenceKind::Worst => {
            for u in tree.leaves().filter_map(|n| n.utility()) {
                values.insert(u.metric_id.clone(), u.bad_value());
            }
        }
        ReferenceKind::Ideal => {
            if evaluation_set.is_empty() {
                return Err(ExplainError::EmptyEvaluationSet);
            }
            for u in tree.leaves().filter_map(|n| n.utility()) {
                let mut best: Option<f64> = None;
                for p in evaluation_set {
                    let v = *p.values.get(&u.metric_id).ok_or_else(|| McdaError::MissingMetric {
                        alternative: p.alternative_id.clone(),
                        metric: u.metric_id.clone(),
                    })?;
                    best = Some(best.map_or(v, |b| u.direction.better(b, v)));
                }
                values.insert(u.metric_id.clone(), best.expect("non-empty set"));
            }
        }
    }
    Ok(ReferenceProfile { kind, values })
}

/// Shapley decomposition of `F(x) - F(r)` among the node's children.
pub fn shapley_contributions(
    params: &ChoquetParams,
    x: &BTreeMap<NodeId, f64>,
    r: &BTreeMap<NodeId, f64>,
) -> Result<BTreeMap<NodeId, f64>> {
    let children: Vec<&NodeId> = params.children().collect();
    let n = children.len();
    if n > MAX_SHAPLEY_ARITY {
        return Err(ExplainError::TooManyChildren(n));
    }
    for c in &children {
        if !x.contains_key(*c) || !r.contains_key(*c) {
            return Err(McdaError::MissingInput((*c).clone()).into());
        }
    }
    let slot: BTreeMap<&str, usize> = children.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let base = params.aggregate(|c| r[c]);
    let worth: Vec<f64> = (0..1usize << n)
        .map(|mask| params.aggregate(|c| if mask >> slot[c] & 1 == 1 { x[c] } else { r[c] }) - base)
        .collect();

    // weight(s) = s! (n - s - 1)! / n!
    let mut fact = vec![1.0f64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as f64;
    }
    let weight: Vec<f64> = (0..n).map(|s| fact[s] * fact[n - s - 1] / fact[n]).collect();

    let mut out = BTreeMap::new();
    for (i, c) in children.iter().enumerate() {
        let bit = 1usize << i;
        let mut phi = 0.0;
        for mask in (0..1usize << n).filter(|m| m & bit == 0) {
            let marginal = worth[mask | bit] - worth[mask];
            if marginal != 0.0 {
                phi += weight[mask.count_ones() as usize] * marginal;
            }
        }
        out.insert((*c).clone(), phi);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub alternative_id: String,
    pub reference: ReferenceProfile,
    pub alternative_score: f64,
    pub reference_score: f64,
    /// Signed contribution of every node to `score(x) - score(reference)`.
    pub contributions: BTreeMap<NodeId, f64>,
    /// Contribution as a percentage of the root contribution; absent when
    /// the alternative and the reference score the same.
    pub percentages: Option<BTreeMap<NodeId, f64>>,
}

pub fn hierarchical_explanation(
    tree: &CriteriaTree,
    alternative: &MeasurementProfile,
    kind: ReferenceKind,
    evaluation_set: &[MeasurementProfile],
) -> Result<ExplanationReport> {
    let reference = reference_profile(kind, tree, evaluation_set)?;
    explain_against(tree, alternative, reference)
}

/// Explanation against an explicit reference profile.
pub fn explain_against(
    tree: &CriteriaTree,
    alternative: &MeasurementProfile,
    reference: ReferenceProfile,
) -> Result<ExplanationReport> {
    let xs = evaluate_tree(tree, alternative)?.scores;
    let rs = evaluate_tree(tree, &reference.as_profile())?.scores;
    let root = tree.root_id();
    let root_contribution = xs[root] - rs[root];

    let mut contributions: BTreeMap<NodeId, f64> = BTreeMap::new();
    contributions.insert(root.to_string(), root_contribution);
    let top_down: Vec<_> = tree.postorder().collect::<Vec<_>>().into_iter().rev().collect();
    for node in top_down {
        let NodeKind::Aggregation { children, params } = &node.kind else { continue };
        let own = contributions[&node.id];
        let local_diff = xs[&node.id] - rs[&node.id];
        let cx: BTreeMap<NodeId, f64> = children.iter().map(|c| (c.clone(), xs[c])).collect();
        let cr: BTreeMap<NodeId, f64> = children.iter().map(|c| (c.clone(), rs[c])).collect();
        let phi = shapley_contributions(params, &cx, &cr)?;
        for c in children {
            // A child whose subtree scores the same for x and r is a null
            // player upstream, so a zero local difference means zero share.
            let share = if local_diff == 0.0 { 0.0 } else { own * phi[c] / local_diff };
            contributions.insert(c.clone(), share);
        }
    }

    let percentages = (root_contribution.abs() > 1e-12).then(|| {
        contributions.iter().map(|(k, v)| (k.clone(), 100.0 * v / root_contribution)).collect()
    });
    Ok(ExplanationReport {
        alternative_id: alternative.alternative_id.clone(),
        reference,
        alternative_score: xs[root],
        reference_score: rs[root],
        contributions,
        percentages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcda::{Direction, Node, UtilityFunction};
    use approx::assert_abs_diff_eq;

    fn m(pairs: &[(&str, f64)]) -> BTreeMap<NodeId, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    fn two_leaf(params: ChoquetParams) -> CriteriaTree {
        let cut = UtilityFunction::from_pairs("maxcut", Direction::HigherIsBetter, &[(0.0, 0.0), (1000.0, 1.0)]).unwrap();
        let clique = UtilityFunction::from_pairs("maxclique", Direction::HigherIsBetter, &[(0.0, 0.0), (1000.0, 1.0)]).unwrap();
        CriteriaTree::new(
            "s",
            "root",
            vec![
                Node::aggregation("root", "root", vec!["cut".into(), "clique".into()], params),
                Node::criterion("cut", "cut", cut),
                Node::criterion("clique", "clique", clique),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pure_min_splits_evenly() {
        let p = ChoquetParams { singleton_weights: m(&[("a", 0.0), ("b", 0.0)]), ..Default::default() }.with_min("a", "b", 1.0).unwrap();
        let phi = shapley_contributions(&p, &m(&[("a", 1.0), ("b", 1.0)]), &m(&[("a", 0.0), ("b", 0.0)])).unwrap();
        assert_eq!(phi, m(&[("a", 0.5), ("b", 0.5)]));
    }

    #[test]
    fn weighted_sum_is_additive() {
        let p = ChoquetParams::weighted_sum([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap();
        let x = m(&[("a", 0.9), ("b", 0.1), ("c", 0.4)]);
        let r = m(&[("a", 0.3), ("b", 0.6), ("c", 0.4)]);
        let phi = shapley_contributions(&p, &x, &r).unwrap();
        for (k, w) in &p.singleton_weights {
            assert_abs_diff_eq!(phi[k], w * (x[k] - r[k]), epsilon = 1e-15);
        }
        let same = shapley_contributions(&p, &x, &x).unwrap();
        assert!(same.values().all(|&v| v == 0.0));
    }

    #[test]
    fn refuses_wide_nodes() {
        let ids: Vec<String> = (0..13).map(|i| format!("c{i}")).collect();
        let p = ChoquetParams::weighted_sum(ids.iter().map(|s| (s.as_str(), 1.0 / 13.0))).unwrap();
        let x: BTreeMap<NodeId, f64> = ids.iter().map(|s| (s.clone(), 1.0)).collect();
        assert_eq!(shapley_contributions(&p, &x, &x), Err(ExplainError::TooManyChildren(13)));
    }

    #[test]
    fn references() {
        let t = two_leaf(ChoquetParams::weighted_sum([("cut", 0.5), ("clique", 0.5)]).unwrap());
        let worst = reference_profile(ReferenceKind::Worst, &t, &[]).unwrap();
        assert_eq!(worst.values, m(&[("maxcut", 0.0), ("maxclique", 0.0)]));
        let set = [
            MeasurementProfile::new("2000Q", [("maxcut", 70.0), ("maxclique", 70.0)]),
            MeasurementProfile::new("Advantage", [("maxcut", 140.0), ("maxclique", 110.0)]),
        ];
        let ideal = reference_profile(ReferenceKind::Ideal, &t, &set).unwrap();
        assert_eq!(ideal.values, m(&[("maxcut", 140.0), ("maxclique", 110.0)]));
        let single = reference_profile(ReferenceKind::Ideal, &t, &set[..1]).unwrap();
        assert_eq!(single.values, set[0].values);
        assert_eq!(reference_profile(ReferenceKind::Ideal, &t, &[]), Err(ExplainError::EmptyEvaluationSet));
    }

    #[test]
    fn symmetric_model_splits_fifty_fifty() {
        let t = two_leaf(ChoquetParams::weighted_sum([("cut", 0.5), ("clique", 0.5)]).unwrap());
        let x = MeasurementProfile::new("x", [("maxcut", 300.0), ("maxclique", 300.0)]);
        let rep = hierarchical_explanation(&t, &x, ReferenceKind::Worst, &[]).unwrap();
        let pct = rep.percentages.unwrap();
        assert_abs_diff_eq!(pct["cut"], 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pct["clique"], 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pct["root"], 100.0, epsilon = 1e-12);
    }

    #[test]
    fn self_comparison_is_all_zero() {
        let t = two_leaf(ChoquetParams::weighted_sum([("cut", 0.7), ("clique", 0.3)]).unwrap());
        let x = MeasurementProfile::new("x", [("maxcut", 300.0), ("maxclique", 100.0)]);
        let rep = hierarchical_explanation(&t, &x, ReferenceKind::Ideal, std::slice::from_ref(&x)).unwrap();
        assert!(rep.contributions.values().all(|&v| v == 0.0));
        assert!(rep.percentages.is_none());
    }
}
