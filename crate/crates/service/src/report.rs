//! Profiles from records, ranked evaluation and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qbench_core::explanation::{hierarchical_explanation, ExplanationReport, ReferenceKind};
use qbench_core::mcda::{evaluate_many, evaluate_tree, ChoquetParams, CriteriaTree, MeasurementProfile, MetricId, NodeId, RecordAggregation, UtilityFunction};
use qbench_core::par::Execution;
use qbench_core::SCHEMA_VERSION;
use serde::{Deserialize, Serialize};

use crate::efficiency::{compute_efficiency, PER_JOULE};
use crate::records::{BenchmarkRecord, ENERGY};
use crate::store::Store;
use crate::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub alternative_id: String,
    pub reason: String,
}

/// Value of `metric` in one record, deriving `<m>_per_joule` from `<m>` and
/// the record's energy when not stored directly.
fn record_value(r: &BenchmarkRecord, metric: &str) -> Option<f64> {
    if let Some(&v) = r.metrics.get(metric) {
        return Some(v);
    }
    let base = metric.strip_suffix(PER_JOULE)?;
    compute_efficiency(*r.metrics.get(base)?, *r.metrics.get(ENERGY)?).ok()
}

/// One profile per alternative. Metric ids have the form `<family>.<metric>`;
/// repeated records fold with the rule the model declares for the metric.
/// Alternatives lacking any metric are excluded, not fatal.
pub fn build_profiles(tree: &CriteriaTree, records: &[BenchmarkRecord]) -> (Vec<MeasurementProfile>, Vec<Exclusion>) {
    let mut by_alt: BTreeMap<&str, Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        by_alt.entry(r.alternative_id.as_str()).or_default().push(r);
    }
    let mut profiles = Vec::new();
    let mut excluded = Vec::new();
    'alt: for (alt, recs) in by_alt {
        let mut values = BTreeMap::new();
        for metric in tree.metric_ids() {
            let Some((family, name)) = metric.split_once('.') else {
                excluded.push(Exclusion { alternative_id: alt.into(), reason: format!("metric id `{metric}` is not of the form <family>.<metric>") });
                continue 'alt;
            };
            let vals: Vec<f64> = recs.iter().filter(|r| r.family == family).filter_map(|r| record_value(r, name)).collect();
            if vals.is_empty() {
                excluded.push(Exclusion { alternative_id: alt.into(), reason: format!("no records for metric `{metric}`") });
                continue 'alt;
            }
            let v = match tree.record_aggregation(metric).unwrap_or_default() {
                RecordAggregation::Mean => vals.iter().sum::<f64>() / vals.len() as f64,
                RecordAggregation::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            };
            values.insert(metric.clone(), v);
        }
        profiles.push(MeasurementProfile { alternative_id: alt.into(), values, intervals: BTreeMap::new() });
    }
    (profiles, excluded)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Competition rank: equal root scores share a rank.
    pub rank: usize,
    pub alternative_id: String,
    pub root_score: f64,
    pub scores: BTreeMap<NodeId, f64>,
    pub profile: BTreeMap<MetricId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub model: String,
    pub scope_label: String,
    pub rows: Vec<ReportRow>,
    pub excluded: Vec<Exclusion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanations: Option<Vec<ExplanationReport>>,
}

/// Evaluates every profile, ranks by root score (ties by identifier for a
/// stable listing) and optionally explains each against a reference.
pub fn evaluate_and_report(
    model: &str,
    tree: &CriteriaTree,
    profiles: Vec<MeasurementProfile>,
    mut excluded: Vec<Exclusion>,
    explain: Option<ReferenceKind>,
    exec: Execution,
) -> Result<Report> {
    let results = evaluate_many(tree, &profiles, exec);
    let mut rows = Vec::new();
    let mut kept = Vec::new();
    for (p, r) in profiles.into_iter().zip(results) {
        match r {
            Ok(e) => {
                rows.push(ReportRow { rank: 0, alternative_id: e.alternative_id, root_score: e.root_score, scores: e.scores, profile: p.values.clone() });
                kept.push(p);
            }
            Err(err) => excluded.push(Exclusion { alternative_id: p.alternative_id.clone(), reason: err.to_string() }),
        }
    }
    rows.sort_by(|a, b| b.root_score.total_cmp(&a.root_score).then_with(|| a.alternative_id.cmp(&b.alternative_id)));
    for i in 0..rows.len() {
        rows[i].rank = if i > 0 && rows[i].root_score == rows[i - 1].root_score { rows[i - 1].rank } else { i + 1 };
    }
    excluded.sort_by(|a, b| a.alternative_id.cmp(&b.alternative_id));
    let explanations = match explain {
        None => None,
        Some(kind) => {
            let by_id: BTreeMap<&str, &MeasurementProfile> = kept.iter().map(|p| (p.alternative_id.as_str(), p)).collect();
            Some(
                rows.iter()
                    .map(|r| hierarchical_explanation(tree, by_id[r.alternative_id.as_str()], kind, &kept))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    };
    Ok(Report { schema_version: SCHEMA_VERSION, model: model.into(), scope_label: tree.scope_label().into(), rows, excluded, explanations })
}

/// Scores every alternative in the store against a stored model.
pub fn score_store(store: &Store, model: &str, explain: Option<ReferenceKind>, exec: Execution) -> Result<Report> {
    let tree = store.load_model(model)?;
    score_with_tree(store, model, &tree, explain, exec)
}

pub fn score_with_tree(store: &Store, model: &str, tree: &CriteriaTree, explain: Option<ReferenceKind>, exec: Execution) -> Result<Report> {
    let (profiles, excluded) = build_profiles(tree, &store.records()?);
    evaluate_and_report(model, tree, profiles, excluded, explain, exec)
}

/// Explanation of one stored alternative. The evaluation set behind the
/// Ideal reference is every alternative the report would rank.
pub fn explain_in_store(store: &Store, model: &str, alternative: &str, kind: ReferenceKind) -> Result<ExplanationReport> {
    let tree = store.load_model(model)?;
    let (profiles, excluded) = build_profiles(&tree, &store.records()?);
    if let Some(e) = excluded.iter().find(|e| e.alternative_id == alternative) {
        return Err(ServiceError::Invalid(format!("alternative `{alternative}` is excluded: {}", e.reason)));
    }
    let kept: Vec<MeasurementProfile> = profiles.into_iter().filter(|p| evaluate_tree(&tree, p).is_ok()).collect();
    let target = kept.iter().find(|p| p.alternative_id == alternative).ok_or_else(|| ServiceError::NotFound(format!("alternative `{alternative}`")))?;
    Ok(hierarchical_explanation(&tree, target, kind, &kept)?)
}

/// Transient replacement of one node's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub node: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ChoquetParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<UtilityFunction>,
}

pub fn apply_overrides(tree: &CriteriaTree, overrides: &[Override]) -> Result<CriteriaTree> {
    let mut t = tree.clone();
    for o in overrides {
        t = match (&o.params, &o.utility) {
            (Some(p), None) => t.with_params(&o.node, p.clone())?,
            (None, Some(u)) => t.with_utility(&o.node, u.clone())?,
            _ => return Err(ServiceError::Invalid(format!("override for `{}` must set exactly one of params or utility", o.node))),
        };
    }
    Ok(t)
}

/// Markdown table of the ranking, followed by exclusions and explanations.
pub fn render_markdown(report: &Report, tree: &CriteriaTree) -> String {
    let cols: Vec<(&str, &str)> = tree.nodes().iter().map(|n| (n.id.as_str(), n.label.as_str())).collect();
    let mut out = String::new();
    let _ = writeln!(out, "# {} ({})\n", report.model, report.scope_label);
    let _ = write!(out, "| Rank | Alternative |");
    for (_, label) in &cols {
        let _ = write!(out, " {label} |");
    }
    let _ = write!(out, "\n|---:|---|");
    for _ in &cols {
        out.push_str("---:|");
    }
    out.push('\n');
    for r in &report.rows {
        let _ = write!(out, "| {} | {} |", r.rank, r.alternative_id);
        for (id, _) in &cols {
            let _ = write!(out, " {:.4} |", r.scores[*id]);
        }
        out.push('\n');
    }
    if !report.excluded.is_empty() {
        out.push_str("\nExcluded:\n\n");
        for e in &report.excluded {
            let _ = writeln!(out, "- {}: {}", e.alternative_id, e.reason);
        }
    }
    if let Some(ex) = &report.explanations {
        for e in ex {
            let _ = writeln!(
                out,
                "\n## {} vs {:?} reference: {:.4} - {:.4} = {:+.4}\n",
                e.alternative_id,
                e.reference.kind,
                e.alternative_score,
                e.reference_score,
                e.alternative_score - e.reference_score
            );
            out.push_str("| Node | Contribution | Share |\n|---|---:|---:|\n");
            for (id, label) in &cols {
                let share = e.percentages.as_ref().map_or("n/a".to_string(), |p| format!("{:.1}%", p[*id]));
                let _ = writeln!(out, "| {label} | {:+.4} | {share} |", e.contributions[*id]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::Provenance;
    use qbench_core::mcda::{Direction, Node};

    fn tree() -> CriteriaTree {
        let u = |m: &str| UtilityFunction::from_pairs(m, Direction::HigherIsBetter, &[(0.0, 0.0), (10.0, 1.0)]).unwrap();
        CriteriaTree::new(
            "demo",
            "root",
            vec![
                Node::aggregation("root", "Root", vec!["a".into(), "b".into()], ChoquetParams::weighted_sum([("a", 0.5), ("b", 0.5)]).unwrap()),
                Node::criterion("a", "A", u("f.score")).with_record_aggregation(RecordAggregation::Max),
                Node::criterion("b", "B", u("g.time_per_joule")),
            ],
        )
        .unwrap()
    }

    fn rec(alt: &str, family: &str, seed: u64, metrics: &[(&str, f64)]) -> BenchmarkRecord {
        BenchmarkRecord {
            alternative_id: alt.into(),
            family: family.into(),
            instance: "i".into(),
            seed: Some(seed),
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            timestamp: "2024-01-01T00:00:00Z".parse().unwrap(),
            provenance: Provenance::Local,
        }
    }

    #[test]
    fn aggregation_rules_and_efficiency() {
        let records = vec![
            rec("x", "f", 0, &[("score", 2.0)]),
            rec("x", "f", 1, &[("score", 6.0)]),
            rec("x", "g", 0, &[("time", 8.0), ("energy_joules", 2.0)]),
            rec("x", "g", 1, &[("time", 4.0), ("energy_joules", 2.0)]),
            rec("y", "f", 0, &[("score", 1.0)]),
        ];
        let (p, ex) = build_profiles(&tree(), &records);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].values["f.score"], 6.0);
        assert_eq!(p[0].values["g.time_per_joule"], 3.0);
        assert_eq!(ex, vec![Exclusion { alternative_id: "y".into(), reason: "no records for metric `g.time_per_joule`".into() }]);
    }

    #[test]
    fn ranking_and_ties() {
        let t = tree();
        let mk = |id: &str, a: f64, b: f64| MeasurementProfile::new(id, [("f.score", a), ("g.time_per_joule", b)]);
        let r = evaluate_and_report("m", &t, vec![mk("p", 5.0, 5.0), mk("q", 9.0, 1.0), mk("r", 1.0, 1.0)], vec![], None, Execution::Sequential).unwrap();
        let ranks: Vec<(usize, &str)> = r.rows.iter().map(|x| (x.rank, x.alternative_id.as_str())).collect();
        assert_eq!(ranks, vec![(1, "p"), (1, "q"), (3, "r")]);
        let single = evaluate_and_report("m", &t, vec![mk("only", 0.0, 0.0)], vec![], None, Execution::Sequential).unwrap();
        assert_eq!(single.rows[0].rank, 1);
    }

    #[test]
    fn evaluation_errors_exclude_one_alternative() {
        let t = tree();
        let bad = MeasurementProfile::new("bad", [("f.score", f64::NAN), ("g.time_per_joule", 1.0)]);
        let good = MeasurementProfile::new("good", [("f.score", 1.0), ("g.time_per_joule", 1.0)]);
        let r = evaluate_and_report("m", &t, vec![bad, good], vec![], Some(ReferenceKind::Worst), Execution::Sequential).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.excluded[0].alternative_id, "bad");
        assert_eq!(r.explanations.as_ref().unwrap().len(), 1);
        let md = render_markdown(&r, &t);
        assert!(md.contains("| 1 | good |") && md.contains("- bad:"));
    }

    #[test]
    fn overrides() {
        let t = tree();
        let same = apply_overrides(&t, &[Override { node: "root".into(), params: Some(t.node("root").unwrap().params().unwrap().clone()), utility: None }]).unwrap();
        assert_eq!(same, t);
        assert!(apply_overrides(&t, &[Override { node: "root".into(), params: None, utility: None }]).is_err());
    }
}
