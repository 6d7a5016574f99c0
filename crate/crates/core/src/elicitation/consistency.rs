use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::capacity::{describe, infeasible_patterns};
use super::{CapacitySession, Pattern, UtilitySession};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Session {
    Utility(UtilitySession),
    Capacity(CapacitySession),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    TooFewElements,
    GapCount,
    NonFinite,
    DuplicateElement,
    BadNotFirst,
    GoodMissing,
    Tie,
    NotMonotone,
    UnknownChild,
    UnsupportedPattern,
    MissingPattern,
    BadNotWorst,
    GoodNotBest,
    RankingNotMonotone,
    Infeasible,
}

/// One problem found in a session, phrased for the decision maker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patterns: Vec<Pattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

impl Violation {
    fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), patterns: Vec::new(), deviation: None }
    }

    fn with_patterns(mut self, patterns: Vec<Pattern>) -> Self {
        self.patterns = patterns;
        self
    }
}

/// Lists everything wrong with a session. An empty list means derivation
/// will succeed.
pub fn check_consistency(session: &Session) -> Vec<Violation> {
    match session {
        Session::Utility(s) => check_utility(s),
        Session::Capacity(s) => check_capacity(s),
    }
}

fn check_utility(s: &UtilitySession) -> Vec<Violation> {
    use ViolationKind::*;
    let mut v = Vec::new();
    let e = &s.elements;
    if e.len() < 2 {
        v.push(Violation::new(TooFewElements, "at least the Bad and Good elements are required"));
        return v;
    }
    if s.gaps.len() != e.len() - 1 {
        v.push(Violation::new(GapCount, format!("{} elements need {} gaps, found {}", e.len(), e.len() - 1, s.gaps.len())));
    }
    if e.iter().any(|x| !x.is_finite()) || !s.good.is_finite() || !s.bad.is_finite() {
        v.push(Violation::new(NonFinite, "elements and anchors must be finite"));
        return v;
    }
    let distinct: BTreeSet<u64> = e.iter().map(|x| x.to_bits()).collect();
    if distinct.len() != e.len() {
        v.push(Violation::new(DuplicateElement, "each metric value may appear only once"));
    }
    if s.bad != e[0] {
        v.push(Violation::new(BadNotFirst, format!("Bad element {} must be ranked first", s.bad)));
    }
    if !e.contains(&s.good) {
        v.push(Violation::new(GoodMissing, format!("Good element {} is not among the ranked elements", s.good)));
    } else if s.good == e[0] {
        v.push(Violation::new(GoodMissing, "Good element must differ from Bad"));
    }
    if s.gaps.iter().any(|g| g.is_tie()) {
        v.push(Violation::new(Tie, "elements must be strictly ordered; ties are not allowed in a utility ranking"));
    }
    if s.direction().is_none() && distinct.len() == e.len() {
        v.push(Violation::new(
            NotMonotone,
            "preference order is neither increasing nor decreasing in the metric; no monotone utility fits",
        ));
    }
    v
}

fn check_capacity(s: &CapacitySession) -> Vec<Violation> {
    use ViolationKind::*;
    let mut v = Vec::new();
    let n = s.children.len();
    let children: BTreeSet<&String> = s.children.iter().collect();
    if n < 2 || children.len() != n {
        v.push(Violation::new(TooFewElements, "an aggregation node needs at least two distinct children"));
        return v;
    }
    if s.gaps.len() + 1 != s.ranking.len() {
        v.push(Violation::new(
            GapCount,
            format!("{} ranked alternatives need {} gaps, found {}", s.ranking.len(), s.ranking.len().saturating_sub(1), s.gaps.len()),
        ));
    }
    let all_good = s.all_good();
    let mut seen: BTreeSet<&Pattern> = BTreeSet::new();
    for p in &s.ranking {
        if let Some(c) = p.iter().find(|c| !children.contains(c)) {
            v.push(Violation::new(UnknownChild, format!("{} references unknown child `{c}`", describe(p))).with_patterns(vec![p.clone()]));
        }
        if !(p.len() <= 2 || *p == all_good) {
            v.push(
                Violation::new(UnsupportedPattern, format!("{} is not a fictitious alternative of the protocol", describe(p)))
                    .with_patterns(vec![p.clone()]),
            );
        }
        if !seen.insert(p) {
            v.push(Violation::new(DuplicateElement, format!("{} is ranked twice", describe(p))).with_patterns(vec![p.clone()]));
        }
    }
    let mut required = vec![Pattern::new(), all_good.clone()];
    required.extend(s.children.iter().map(|c| Pattern::from([c.clone()])));
    for p in required {
        if !seen.contains(&p) {
            v.push(Violation::new(MissingPattern, format!("{} must be ranked", describe(&p))).with_patterns(vec![p]));
        }
    }
    if s.ranking.first().is_some_and(|p| !p.is_empty()) {
        v.push(Violation::new(BadNotWorst, "all-Bad must be ranked worst"));
    }
    if s.ranking.last().is_some_and(|p| *p != all_good) {
        v.push(Violation::new(GoodNotBest, "all-Good must be ranked best"));
    }
    if !v.is_empty() {
        return v;
    }

    // Adding Good levels can never make an alternative worse.
    let cumulative: Vec<f64> =
        std::iter::once(0.0).chain(s.gaps.iter().scan(0.0, |acc, g| { *acc += g.value(); Some(*acc) })).collect();
    for (i, a) in s.ranking.iter().enumerate() {
        for (j, b) in s.ranking.iter().enumerate() {
            if a.is_subset(b) && a != b && cumulative[j] < cumulative[i] {
                v.push(
                    Violation::new(
                        RankingNotMonotone,
                        format!("{} is ranked below {} although it is Good on more inputs", describe(b), describe(a)),
                    )
                    .with_patterns(vec![a.clone(), b.clone()]),
                );
            }
        }
    }
    if !v.is_empty() {
        return v;
    }
    match infeasible_patterns(s) {
        Ok(found) => v.extend(found),
        Err(e) => v.push(Violation::new(Infeasible, format!("feasibility check failed: {e}"))),
    }
    v
}
