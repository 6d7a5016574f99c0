use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{OptError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GraphDocument {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bipartition: Option<Vec<bool>>,
}

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`, in
/// insertion order. `bipartition[v]` is true for right-side vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphDocument", into = "GraphDocument")]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    bipartition: Option<Vec<bool>>,
}

impl TryFrom<GraphDocument> for Graph {
    type Error = OptError;
    fn try_from(d: GraphDocument) -> Result<Self> {
        let g = Graph::new(d.num_vertices, d.edges)?;
        match d.bipartition {
            Some(side) => g.with_bipartition(side),
            None => Ok(g),
        }
    }
}

impl From<Graph> for GraphDocument {
    fn from(g: Graph) -> Self {
        GraphDocument { num_vertices: g.num_vertices, edges: g.edges, bipartition: g.bipartition }
    }
}

impl Graph {
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(OptError::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= num_vertices || b >= num_vertices {
                return Err(OptError::InvalidGraph(format!("edge ({a}, {b}) out of range for {num_vertices} vertices")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(OptError::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            out.push(e);
        }
        Ok(Self { num_vertices, edges: out, bipartition: None })
    }

    pub fn with_bipartition(mut self, side: Vec<bool>) -> Result<Self> {
        if side.len() != self.num_vertices {
            return Err(OptError::InvalidGraph(format!(
                "bipartition covers {} vertices, graph has {}",
                side.len(),
                self.num_vertices
            )));
        }
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| side[a] == side[b]) {
            return Err(OptError::NotBipartite(format!("edge ({a}, {b}) does not cross the bipartition")));
        }
        self.bipartition = Some(side);
        Ok(self)
    }

    /// Erdős–Rényi `G(n, p)`: each of the `n(n-1)/2` edges independently.
    pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Self { num_vertices: n, edges, bipartition: None }
    }

    /// Random bipartite graph with left vertices `0..left` and right
    /// vertices `left..left+right`.
    pub fn random_bipartite<R: Rng>(left: usize, right: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for a in 0..left {
            for b in 0..right {
                if rng.gen_bool(p) {
                    edges.push((a, left + b));
                }
            }
        }
        let side = (0..left + right).map(|v| v >= left).collect();
        Self { num_vertices: left + right, edges, bipartition: Some(side) }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bipartition(&self) -> Option<&[bool]> {
        self.bipartition.as_deref()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vertices];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Number of edges with endpoints on different sides of `side`.
    pub fn cut_size(&self, side: &[bool]) -> usize {
        self.edges.iter().filter(|&&(a, b)| side[a] != side[b]).count()
    }
}
