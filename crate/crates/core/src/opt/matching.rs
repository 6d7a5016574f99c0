use std::collections::VecDeque;

use super::graph::Graph;
use super::problem::{Assignment, Family, ProblemMeta, PseudoBooleanProblem, Sense};
use super::{OptError, Result};

/// Maximum-cardinality matching as a maximisation over one variable per
/// edge: `sum_e x_e - P * sum_v sum_{e<f at v} x_e x_f` with
/// `P = max degree + 1`. Any conflicting pair costs more than any edge can
/// gain, so optima are matchings.
pub fn matching_problem(g: &Graph) -> Result<PseudoBooleanProblem> {
    let penalty = (g.max_degree() + 1) as f64;
    let mut incident = vec![Vec::new(); g.num_vertices()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut terms: Vec<(Vec<usize>, f64)> = (0..g.num_edges()).map(|e| (vec![e], 1.0)).collect();
    for edges in &incident {
        for (i, &e) in edges.iter().enumerate() {
            for &f in &edges[i + 1..] {
                terms.push((vec![e, f], -penalty));
            }
        }
    }
    PseudoBooleanProblem::new(g.num_edges(), terms, Sense::Maximize, ProblemMeta::new(Family::Matching))
}

/// Selected edges, or `None` when two of them share a vertex.
pub fn decode_matching(g: &Graph, a: &Assignment) -> Result<Option<Vec<(usize, usize)>>> {
    if a.len() != g.num_edges() {
        return Err(OptError::LengthMismatch { expected: g.num_edges(), found: a.len() });
    }
    let mut used = vec![false; g.num_vertices()];
    let mut out = Vec::new();
    for (&(u, v), &on) in g.edges().iter().zip(a.bits()) {
        if on {
            if used[u] || used[v] {
                return Ok(None);
            }
            used[u] = true;
            used[v] = true;
            out.push((u, v));
        }
    }
    Ok(Some(out))
}

/// Exact maximum matching size by Hopcroft–Karp.
pub fn matching_oracle(g: &Graph) -> Result<usize> {
    let side = g.bipartition().ok_or_else(|| OptError::NotBipartite("graph carries no bipartition".into()))?;
    let left: Vec<usize> = (0..g.num_vertices()).filter(|&v| !side[v]).collect();
    let mut adj = vec![Vec::new(); g.num_vertices()];
    for &(a, b) in g.edges() {
        let (l, r) = if side[a] { (b, a) } else { (a, b) };
        adj[l].push(r);
    }
    const FREE: usize = usize::MAX;
    let n = g.num_vertices();
    let mut mate = vec![FREE; n];
    let mut dist = vec![usize::MAX; n];
    let mut size = 0;
    loop {
        // Layer free left vertices, then alternate along matched edges.
        let mut queue = VecDeque::new();
        for &l in &left {
            if mate[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                match mate[r] {
                    FREE => found = true,
                    m if dist[m] == usize::MAX => {
                        dist[m] = dist[l] + 1;
                        queue.push_back(m);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return Ok(size);
        }
        for &l in &left {
            if mate[l] == FREE && augment(l, &adj, &mut mate, &mut dist) {
                size += 1;
            }
        }
    }
}

fn augment(l: usize, adj: &[Vec<usize>], mate: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let m = mate[r];
        if m == usize::MAX || (dist[m] == dist[l] + 1 && augment(m, adj, mate, dist)) {
            mate[l] = r;
            mate[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}
