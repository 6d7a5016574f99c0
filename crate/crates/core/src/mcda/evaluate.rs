use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CriteriaTree, McdaError, MetricId, NodeId, NodeKind, Result};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Raw metric values of one alternative. `intervals` carries optional
/// imprecise measurements; a metric may have a point value, an interval, or
/// both (the interval wins for interval evaluation).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementProfile {
    pub alternative_id: String,
    pub values: BTreeMap<MetricId, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub intervals: BTreeMap<MetricId, Interval>,
}

impl MeasurementProfile {
    pub fn new<I, S>(alternative_id: impl Into<String>, values: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<MetricId>,
    {
        Self {
            alternative_id: alternative_id.into(),
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            intervals: BTreeMap::new(),
        }
    }

    pub fn with_interval(mut self, metric: impl Into<MetricId>, lo: f64, hi: f64) -> Self {
        self.intervals.insert(metric.into(), Interval { lo, hi });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub alternative_id: String,
    pub scores: BTreeMap<NodeId, f64>,
    pub root_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEvaluation {
    pub alternative_id: String,
    pub scores: BTreeMap<NodeId, Interval>,
    pub root: Interval,
}

/// Point evaluation: utilities at the leaves, Choquet aggregation upwards.
pub fn evaluate_tree(tree: &CriteriaTree, profile: &MeasurementProfile) -> Result<EvaluationResult> {
    let mut scores: BTreeMap<NodeId, f64> = BTreeMap::new();
    for node in tree.postorder() {
        let score = match &node.kind {
            NodeKind::Criterion { utility, .. } => {
                let v = *profile.values.get(&utility.metric_id).ok_or_else(|| McdaError::MissingMetric {
                    alternative: profile.alternative_id.clone(),
                    metric: utility.metric_id.clone(),
                })?;
                utility.apply(v).map_err(|e| e.at(&node.id))?
            }
            NodeKind::Aggregation { params, .. } => params.aggregate(|c| scores[c]),
        };
        scores.insert(node.id.clone(), score);
    }
    let root_score = scores[tree.root_id()];
    Ok(EvaluationResult { alternative_id: profile.alternative_id.clone(), scores, root_score })
}

/// Interval evaluation. Each leaf interval maps to the utility interval of
/// its endpoints, and lower and upper bounds propagate independently through
/// the monotone aggregations. Degenerate intervals reproduce
/// [`evaluate_tree`] exactly.
pub fn evaluate_interval(tree: &CriteriaTree, profile: &MeasurementProfile) -> Result<IntervalEvaluation> {
    let mut lo: BTreeMap<&str, f64> = BTreeMap::new();
    let mut hi: BTreeMap<&str, f64> = BTreeMap::new();
    for node in tree.postorder() {
        let (l, h) = match &node.kind {
            NodeKind::Criterion { utility, .. } => {
                let metric = &utility.metric_id;
                let iv = match (profile.intervals.get(metric), profile.values.get(metric)) {
                    (Some(iv), _) => *iv,
                    (None, Some(&v)) => Interval::point(v),
                    (None, None) => {
                        return Err(McdaError::MissingMetric {
                            alternative: profile.alternative_id.clone(),
                            metric: metric.clone(),
                        })
                    }
                };
                if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                    return Err(McdaError::InvalidInterval { metric: metric.clone(), lo: iv.lo, hi: iv.hi });
                }
                let a = utility.apply(iv.lo).map_err(|e| e.at(&node.id))?;
                let b = utility.apply(iv.hi).map_err(|e| e.at(&node.id))?;
                (a.min(b), a.max(b))
            }
            NodeKind::Aggregation { params, .. } => (params.aggregate(|c| lo[c]), params.aggregate(|c| hi[c])),
        };
        lo.insert(&node.id, l);
        hi.insert(&node.id, h);
    }
    let scores: BTreeMap<NodeId, Interval> =
        lo.iter().map(|(id, &l)| (id.to_string(), Interval { lo: l, hi: hi[id] })).collect();
    let root = scores[tree.root_id()];
    Ok(IntervalEvaluation { alternative_id: profile.alternative_id.clone(), scores, root })
}

/// Evaluates a batch of profiles against one shared tree.
pub fn evaluate_many(
    tree: &CriteriaTree,
    profiles: &[MeasurementProfile],
    exec: Execution,
) -> Vec<Result<EvaluationResult>> {
    exec.map(profiles.iter().collect(), |p| evaluate_tree(tree, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcda::{ChoquetParams, Direction, Node, UtilityFunction};
    use approx::assert_abs_diff_eq;

    fn qscore_tree(params: ChoquetParams) -> CriteriaTree {
        let cut = UtilityFunction::from_pairs(
            "maxcut",
            Direction::HigherIsBetter,
            &[(0.0, 0.0), (17.0, 2.0 / 15.0), (70.0, 0.4), (140.0, 2.0 / 3.0), (1000.0, 1.0)],
        )
        .unwrap();
        let clique = UtilityFunction::from_pairs(
            "maxclique",
            Direction::HigherIsBetter,
            &[(0.0, 0.0), (12.0, 2.0 / 15.0), (70.0, 0.4), (110.0, 2.0 / 3.0), (1000.0, 1.0)],
        )
        .unwrap();
        CriteriaTree::new(
            "annealers",
            "root",
            vec![
                Node::aggregation("root", "Overall", vec!["cut".into(), "clique".into()], params),
                Node::criterion("cut", "Q-score MaxCut", cut),
                Node::criterion("clique", "Q-score MaxClique", clique),
            ],
        )
        .unwrap()
    }

    fn fixture_params() -> ChoquetParams {
        ChoquetParams {
            singleton_weights: [("cut".to_string(), 1.0 / 3.0), ("clique".to_string(), 1.0 / 6.0)].into(),
            ..Default::default()
        }
        .with_max("cut", "clique", 0.5)
        .unwrap()
    }

    #[test]
    fn anchors_map_to_zero_and_one() {
        let t = qscore_tree(fixture_params());
        let bad = evaluate_tree(&t, &MeasurementProfile::new("bad", [("maxcut", 0.0), ("maxclique", 0.0)])).unwrap();
        assert_eq!(bad.root_score, 0.0);
        let good = evaluate_tree(&t, &MeasurementProfile::new("good", [("maxcut", 1000.0), ("maxclique", 1000.0)])).unwrap();
        assert_abs_diff_eq!(good.root_score, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn composes_utility_and_choquet() {
        let p = fixture_params();
        let t = qscore_tree(p.clone());
        let r = evaluate_tree(&t, &MeasurementProfile::new("adv", [("maxcut", 140.0), ("maxclique", 110.0)])).unwrap();
        assert_eq!(r.scores["cut"], 2.0 / 3.0);
        assert_eq!(r.scores["clique"], 2.0 / 3.0);
        let expected = p.evaluate(&[("cut".to_string(), 2.0 / 3.0), ("clique".to_string(), 2.0 / 3.0)].into()).unwrap();
        assert_eq!(r.root_score, expected);
    }

    #[test]
    fn missing_metric_is_reported() {
        let t = qscore_tree(fixture_params());
        let err = evaluate_tree(&t, &MeasurementProfile::new("x", [("maxcut", 10.0)])).unwrap_err();
        assert_eq!(err, McdaError::MissingMetric { alternative: "x".into(), metric: "maxclique".into() });
    }

    #[test]
    fn degenerate_intervals_reproduce_point_scores() {
        let t = qscore_tree(fixture_params());
        let p = MeasurementProfile::new("adv", [("maxcut", 140.0), ("maxclique", 110.0)])
            .with_interval("maxcut", 140.0, 140.0);
        let point = evaluate_tree(&t, &p).unwrap();
        let iv = evaluate_interval(&t, &p).unwrap();
        for (id, s) in &point.scores {
            assert_eq!(iv.scores[id], Interval::point(*s));
        }
    }

    #[test]
    fn widening_never_shrinks_root_interval() {
        let t = qscore_tree(fixture_params());
        let base = MeasurementProfile::new("adv", [("maxcut", 140.0), ("maxclique", 110.0)]);
        let narrow = evaluate_interval(&t, &base.clone().with_interval("maxcut", 120.0, 150.0)).unwrap();
        let wide = evaluate_interval(&t, &base.clone().with_interval("maxcut", 60.0, 300.0)).unwrap();
        assert!(wide.root.lo <= narrow.root.lo && narrow.root.hi <= wide.root.hi);
        let inverted = evaluate_interval(&t, &base.with_interval("maxcut", 150.0, 120.0));
        assert!(matches!(inverted, Err(McdaError::InvalidInterval { .. })));
    }

    #[test]
    fn batch_matches_single() {
        let t = qscore_tree(fixture_params());
        let profiles: Vec<_> = (0..20)
            .map(|i| MeasurementProfile::new(format!("a{i}"), [("maxcut", 10.0 * i as f64), ("maxclique", 5.0 * i as f64)]))
            .collect();
        let batch = evaluate_many(&t, &profiles, Execution::Parallel);
        for (p, r) in profiles.iter().zip(batch) {
            assert_eq!(r.unwrap(), evaluate_tree(&t, p).unwrap());
        }
    }
}
