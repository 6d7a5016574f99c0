use std::collections::BTreeMap;

use super::problem::{Polynomial, PseudoBooleanProblem};
use super::{OptError, Result};

/// `1 + sum |c|` over non-constant terms.
pub fn default_penalty(p: &PseudoBooleanProblem) -> f64 {
    1.0 + p.terms().filter(|(v, _)| !v.is_empty()).map(|(_, c)| c.abs()).sum::<f64>()
}

/// Rosenberg reduction to degree 2. A pair `x_i x_j` taken from a
/// highest-degree term is replaced by a fresh ancilla `y` in every term of
/// degree three or more containing it, and `M (x_i x_j - 2 x_i y - 2 x_j y + 3 y)`
/// is added in the minimisation direction. Ancillas are appended after the
/// original variables.
pub fn quadratize(p: &PseudoBooleanProblem, penalty: Option<f64>) -> Result<PseudoBooleanProblem> {
    if p.degree() <= 2 {
        return Err(OptError::AlreadyQuadratic(p.degree()));
    }
    let m = penalty.unwrap_or_else(|| default_penalty(p));
    if !(m.is_finite() && m > 0.0) {
        return Err(OptError::InvalidPenalty(m));
    }
    // The penalty is an energy; for maximisation it is subtracted.
    let m = m * p.sense().energy_sign();
    let mut terms: BTreeMap<Vec<usize>, f64> = p.polynomial().terms().clone();
    let mut penalties = Polynomial::default();
    let mut num_vars = p.num_vars();
    loop {
        let top = terms.keys().map(Vec::len).max().unwrap_or(0);
        if top <= 2 {
            break;
        }
        let key = terms.keys().find(|k| k.len() == top).expect("top-degree term").clone();
        let (i, j) = (key[0], key[1]);
        let y = num_vars;
        num_vars += 1;
        let mut next = BTreeMap::new();
        for (vars, c) in std::mem::take(&mut terms) {
            let vars = if vars.len() >= 3 && vars.contains(&i) && vars.contains(&j) {
                let mut v: Vec<usize> = vars.into_iter().filter(|&v| v != i && v != j).collect();
                v.push(y);
                v.sort_unstable();
                v
            } else {
                vars
            };
            *next.entry(vars).or_insert(0.0) += c;
        }
        terms = next;
        penalties.add_term(vec![i, j], m);
        penalties.add_term(vec![i, y], -2.0 * m);
        penalties.add_term(vec![j, y], -2.0 * m);
        penalties.add_term(vec![y], 3.0 * m);
    }
    let mut meta = p.meta().clone();
    meta.original_vars.get_or_insert(p.num_vars());
    PseudoBooleanProblem::new(num_vars, terms.into_iter().chain(penalties.into_terms()), p.sense(), meta)
}
