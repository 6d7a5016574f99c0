use std::collections::{BTreeMap, BTreeSet};

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use super::{check_consistency, value_scale_from_intensities, ElicitationError, Gap, Result, Session, Violation, ViolationKind};
use crate::mcda::{ChildPair, ChoquetParams, NodeId};

/// Pattern targets must be met within this tolerance for a session to count
/// as consistent.
pub const FEASIBILITY_EPSILON: f64 = 1e-6;

/// Nodes with more children than this only get interaction terms for pairs
/// whose two-Good pattern was ranked.
const FULL_PAIR_ARITY: usize = 4;

/// Set of children at their Good level; the others sit at Bad.
pub type Pattern = BTreeSet<NodeId>;

/// Ranked fictitious alternatives for one aggregation node, worst first, and
/// the labelled gaps between consecutive ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySession {
    pub node_id: NodeId,
    pub children: Vec<NodeId>,
    pub ranking: Vec<Pattern>,
    pub gaps: Vec<Gap>,
}

pub fn pattern(ids: &[&str]) -> Pattern {
    ids.iter().map(|s| s.to_string()).collect()
}

impl CapacitySession {
    pub fn all_good(&self) -> Pattern {
        self.children.iter().cloned().collect()
    }

    /// Target value of every ranked pattern: cumulative intensity anchored at
    /// all-Bad (0) and all-Good (1).
    pub(crate) fn targets(&self) -> Result<Vec<f64>> {
        let zero = self.ranking.iter().position(|p| p.is_empty()).ok_or_else(|| ElicitationError::AnchorNotFound("all-Bad".into()))?;
        let all = self.all_good();
        let one = self.ranking.iter().position(|p| *p == all).ok_or_else(|| ElicitationError::AnchorNotFound("all-Good".into()))?;
        let values: Vec<f64> = self.gaps.iter().map(|g| g.value()).collect();
        value_scale_from_intensities(&values, zero, one)
    }

    /// Pairs that receive min/max coefficients.
    fn interaction_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.children.len();
        let all = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        if n <= FULL_PAIR_ARITY {
            return all.collect();
        }
        all.filter(|&(i, j)| self.ranking.iter().any(|p| p.len() == 2 && p.contains(&self.children[i]) && p.contains(&self.children[j])))
            .collect()
    }
}

/// Choquet value of the fictitious alternative that is Good exactly on
/// `good` (score 1) and Bad elsewhere (score 0).
pub fn pattern_value(params: &ChoquetParams, good: &Pattern) -> f64 {
    params.aggregate(|c| if good.contains(c) { 1.0 } else { 0.0 })
}

/// Linear model of pattern values in the capacity coefficients. Variables
/// are laid out as singletons, then min terms, then max terms.
struct CapacityModel<'a> {
    children: &'a [NodeId],
    pairs: Vec<(usize, usize)>,
}

impl<'a> CapacityModel<'a> {
    fn num_vars(&self) -> usize {
        self.children.len() + 2 * self.pairs.len()
    }

    fn row(&self, good: &Pattern) -> Vec<f64> {
        let n = self.children.len();
        let k = self.pairs.len();
        let on: Vec<bool> = self.children.iter().map(|c| good.contains(c)).collect();
        let mut row = vec![0.0; self.num_vars()];
        for i in 0..n {
            row[i] = on[i] as u8 as f64;
        }
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            row[n + p] = (on[i] && on[j]) as u8 as f64;
            row[n + k + p] = (on[i] || on[j]) as u8 as f64;
        }
        row
    }

    fn to_params(&self, x: &[f64]) -> Result<ChoquetParams> {
        let clean = |v: f64| if v < 1e-14 { 0.0 } else { v };
        let n = self.children.len();
        let k = self.pairs.len();
        let mut params = ChoquetParams {
            singleton_weights: self.children.iter().enumerate().map(|(i, c)| (c.clone(), clean(x[i]))).collect(),
            ..Default::default()
        };
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let pair = ChildPair::new(self.children[i].as_str(), self.children[j].as_str())?;
            let (wmin, wmax) = (clean(x[n + p]), clean(x[n + k + p]));
            if wmin > 0.0 {
                params.min_weights.insert(pair.clone(), wmin);
            }
            if wmax > 0.0 {
                params.max_weights.insert(pair, wmax);
            }
        }
        params.validate()?;
        Ok(params)
    }
}

fn add_row(lp: &mut Problem, vars: &[Variable], row: &[f64], extra: &[(Variable, f64)], rhs: f64) {
    let expr: Vec<(Variable, f64)> =
        vars.iter().zip(row).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).chain(extra.iter().copied()).collect();
    lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, rhs);
}

/// Patterns whose value is not fixed by normalisation alone.
fn constrained(session: &CapacitySession, targets: &[f64]) -> Vec<(Pattern, f64)> {
    let all = session.all_good();
    session.ranking.iter().zip(targets).filter(|(p, _)| !p.is_empty() && **p != all).map(|(p, &t)| (p.clone(), t)).collect()
}

/// Least-absolute-deviation fit of the targets. Returns the coefficient
/// vector and the signed deviation `value - target` per constrained pattern.
fn closest_fit(model: &CapacityModel<'_>, rows: &[(Pattern, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = (0..model.num_vars()).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    add_row(&mut lp, &vars, &vec![1.0; vars.len()], &[], 1.0);
    let mut slacks = Vec::with_capacity(rows.len());
    for (p, t) in rows {
        let over = lp.add_var(1.0, (0.0, f64::INFINITY));
        let under = lp.add_var(1.0, (0.0, f64::INFINITY));
        add_row(&mut lp, &vars, &model.row(p), &[(under, 1.0), (over, -1.0)], *t);
        slacks.push((over, under));
    }
    let sol = lp.solve().map_err(|e| ElicitationError::Solver(e.to_string()))?;
    let sol = sol.into_solution().map_err(|_| ElicitationError::Solver("interrupted".into()))?;
    let x: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
    let dev = slacks.iter().map(|&(o, u)| sol.var_value(o) - sol.var_value(u)).collect();
    Ok((x, dev))
}

/// Patterns whose targets cannot be met within [`FEASIBILITY_EPSILON`].
pub(crate) fn infeasible_patterns(session: &CapacitySession) -> Result<Vec<Violation>> {
    let targets = session.targets()?;
    let model = CapacityModel { children: &session.children, pairs: session.interaction_pairs() };
    let rows = constrained(session, &targets);
    let (_, dev) = closest_fit(&model, &rows)?;
    Ok(rows
        .iter()
        .zip(dev)
        .filter(|(_, d)| d.abs() > FEASIBILITY_EPSILON)
        .map(|((p, t), d)| Violation {
            kind: ViolationKind::Infeasible,
            message: format!(
                "pattern {} cannot reach its target {:.4}; closest achievable value is {:.4}",
                describe(p),
                t,
                t + d
            ),
            patterns: vec![p.clone()],
            deviation: Some(d),
        })
        .collect())
}

pub(crate) fn describe(p: &Pattern) -> String {
    if p.is_empty() {
        "<all Bad>".into()
    } else {
        format!("<Good on {}>", p.iter().cloned().collect::<Vec<_>>().join(", "))
    }
}

/// Derives 2-additive Choquet coefficients that reproduce the session's
/// targets. Among all fitting capacities the one with the least total
/// interaction mass `sum(wmin + wmax)` is returned.
pub fn derive_capacity(session: &CapacitySession) -> Result<ChoquetParams> {
    let violations = check_consistency(&Session::Capacity(session.clone()));
    if !violations.is_empty() {
        let infeasible = violations.iter().all(|v| v.kind == ViolationKind::Infeasible);
        return Err(if infeasible { ElicitationError::Inconsistent(violations) } else { ElicitationError::InvalidSession(violations) });
    }
    let targets = session.targets()?;
    let model = CapacityModel { children: &session.children, pairs: session.interaction_pairs() };
    let rows = constrained(session, &targets);
    let (x0, _) = closest_fit(&model, &rows)?;

    // Second pass: keep every pattern at the value reached by the fit and
    // minimise interaction mass.
    let n = session.children.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> =
        (0..model.num_vars()).map(|i| lp.add_var(if i < n { 0.0 } else { 1.0 }, (0.0, f64::INFINITY))).collect();
    add_row(&mut lp, &vars, &vec![1.0; vars.len()], &[], 1.0);
    for (p, _) in &rows {
        let row = model.row(p);
        let reached: f64 = row.iter().zip(&x0).map(|(a, b)| a * b).sum();
        add_row(&mut lp, &vars, &row, &[], reached);
    }
    let sol = lp.solve().map_err(|e| ElicitationError::Solver(e.to_string()))?;
    let sol = sol.into_solution().map_err(|_| ElicitationError::Solver("interrupted".into()))?;
    let x: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
    let params = model.to_params(&x)?;

    for (p, t) in session.ranking.iter().zip(&targets) {
        let v = pattern_value(&params, p);
        if (v - t).abs() > FEASIBILITY_EPSILON {
            return Err(ElicitationError::Solver(format!("pattern {} evaluates to {v}, target {t}", describe(p))));
        }
    }
    Ok(params)
}

/// Closed-form capacity for a node with two children, given the targets of
/// the two single-Good patterns. Redundancy absorbs `t_a + t_b - 1` when the
/// targets sum above one; complementarity absorbs `1 - t_a - t_b` otherwise.
pub fn closed_form_two_children(a: &str, t_a: f64, b: &str, t_b: f64) -> Result<ChoquetParams> {
    let excess = t_a + t_b - 1.0;
    let (wa, wb, wmin, wmax) = if excess > 0.0 { (t_a - excess, t_b - excess, 0.0, excess) } else { (t_a, t_b, -excess, 0.0) };
    let mut params = ChoquetParams {
        singleton_weights: BTreeMap::from([(a.to_string(), wa), (b.to_string(), wb)]),
        ..Default::default()
    };
    if wmin > 0.0 {
        params = params.with_min(a, b, wmin)?;
    }
    if wmax > 0.0 {
        params = params.with_max(a, b, wmax)?;
    }
    params.validate()?;
    Ok(params)
}
