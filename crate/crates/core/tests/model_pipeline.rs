use qbench_core::elicitation::{derive_capacity, derive_utility_function, pattern, CapacitySession, IntensityLabel::*, UtilitySession};
use qbench_core::explanation::{hierarchical_explanation, ReferenceKind};
use qbench_core::mcda::{evaluate_interval, evaluate_tree, ChoquetParams, CriteriaTree, Direction, MeasurementProfile, Node, UtilityFunction};
use proptest::prelude::*;

fn placeholder(metric: &str) -> UtilityFunction {
    UtilityFunction::from_pairs(metric, Direction::HigherIsBetter, &[(0.0, 0.0), (1000.0, 1.0)]).unwrap()
}

/// Elicits both utilities and the root capacity into a two-leaf tree.
fn elicited_tree() -> CriteriaTree {
    let skeleton = CriteriaTree::new(
        "annealers",
        "root",
        vec![
            Node::aggregation("root", "Q-score", vec!["cut".into(), "clique".into()], ChoquetParams::weighted_sum([("cut", 0.5), ("clique", 0.5)]).unwrap()),
            Node::criterion("cut", "MaxCut", placeholder("maxcut")),
            Node::criterion("clique", "MaxClique", placeholder("maxclique")),
        ],
    )
    .unwrap();
    let gaps = vec![Weak.into(), Strong.into(), Strong.into(), VeryStrong.into()];
    let cut = derive_utility_function(&UtilitySession::new("maxcut", vec![0.0, 17.0, 70.0, 140.0, 1000.0], gaps.clone(), 1000.0)).unwrap();
    let clique = derive_utility_function(&UtilitySession::new("maxclique", vec![0.0, 12.0, 70.0, 110.0, 1000.0], gaps, 1000.0)).unwrap();
    let capacity = derive_capacity(&CapacitySession {
        node_id: "root".into(),
        children: vec!["cut".into(), "clique".into()],
        ranking: vec![pattern(&[]), pattern(&["clique"]), pattern(&["cut"]), pattern(&["cut", "clique"])],
        gaps: vec![Strong.into(), VeryWeak.into(), VeryWeak.into()],
    })
    .unwrap();
    skeleton.with_utility("cut", cut).unwrap().with_utility("clique", clique).unwrap().with_params("root", capacity).unwrap()
}

fn profile(id: &str, cut: f64, clique: f64) -> MeasurementProfile {
    MeasurementProfile::new(id, [("maxcut", cut), ("maxclique", clique)])
}

#[test]
fn document_round_trip_is_byte_identical() {
    let tree = elicited_tree();
    let first = serde_json::to_string_pretty(&tree).unwrap();
    let back: CriteriaTree = serde_json::from_str(&first).unwrap();
    assert_eq!(back, tree);
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), first);
}

#[test]
fn dominating_alternative_ranks_higher() {
    let tree = elicited_tree();
    let adv = evaluate_tree(&tree, &profile("advantage", 140.0, 110.0)).unwrap();
    let old = evaluate_tree(&tree, &profile("2000q", 70.0, 70.0)).unwrap();
    assert!(adv.root_score > old.root_score);
    let i = tree.node("root").unwrap().params().unwrap().importance_and_interaction();
    assert!(i.importance["cut"] > i.importance["clique"]);
}

#[test]
fn shares_favour_the_more_important_criterion() {
    // Equal utility deficits against the ideal: the more important child
    // takes the larger share.
    let tree = elicited_tree();
    let set = [profile("a", 140.0, 110.0), profile("b", 70.0, 70.0)];
    let e = hierarchical_explanation(&tree, &set[1], ReferenceKind::Ideal, &set).unwrap();
    let pct = e.percentages.unwrap();
    assert!(pct["cut"] > pct["clique"]);
    assert!((pct["cut"] + pct["clique"] - 100.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn intervals_bracket_every_point_inside(lo in 0.0f64..1000.0, w in 0.0f64..500.0, f in 0.0f64..1.0, clique in 0.0f64..1000.0) {
        let tree = elicited_tree();
        let hi = lo + w;
        let iv = evaluate_interval(&tree, &profile("x", lo, clique).with_interval("maxcut", lo, hi)).unwrap();
        let inside = evaluate_tree(&tree, &profile("x", lo + f * w, clique)).unwrap();
        prop_assert!(iv.root.lo <= inside.root_score + 1e-12 && inside.root_score <= iv.root.hi + 1e-12);
    }

    #[test]
    fn relabelling_alternatives_keeps_scores(cut in 0.0f64..2000.0, clique in 0.0f64..2000.0) {
        let tree = elicited_tree();
        let a = evaluate_tree(&tree, &profile("first", cut, clique)).unwrap();
        let b = evaluate_tree(&tree, &profile("zz-other", cut, clique)).unwrap();
        prop_assert_eq!(a.scores, b.scores);
    }
}
