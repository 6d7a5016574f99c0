use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::factor::factorization_problem;
use super::graph::Graph;
use super::linear::LinearSystem;
use super::matching::matching_problem;
use super::problem::{Family, ProblemMeta, PseudoBooleanProblem, Sense};
use super::{OptError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchingSpec {
    /// Each left/right pair joined independently with the given probability.
    RandomBipartite { left: usize, right: usize, edge_probability: f64 },
    /// Stand-in hard family, not the published G_n series: left `i` joins
    /// right `j` for every `j >= i`. The perfect matching is unique and
    /// greedy or local moves stall on many maximal but smaller matchings.
    Staircase { k: usize },
    /// Caller-supplied bipartite graph, e.g. loaded from a data file.
    Explicit { graph: Graph },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceSpec {
    MaxCut { n: usize },
    Matching(MatchingSpec),
    Hobo { num_vars: usize, degree: usize, num_terms: usize },
    Factorization { n: u64 },
    LinearSystem { dim: usize },
}

impl InstanceSpec {
    pub fn family(&self) -> Family {
        match self {
            InstanceSpec::MaxCut { .. } => Family::MaxCut,
            InstanceSpec::Matching(_) => Family::Matching,
            InstanceSpec::Hobo { .. } => Family::Hobo,
            InstanceSpec::Factorization { .. } => Family::Factorization,
            InstanceSpec::LinearSystem { .. } => Family::LinearSystem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    PseudoBoolean {
        problem: PseudoBooleanProblem,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<Graph>,
    },
    Linear { system: LinearSystem, seed: u64 },
}

impl Instance {
    pub fn problem(&self) -> Option<&PseudoBooleanProblem> {
        match self {
            Instance::PseudoBoolean { problem, .. } => Some(problem),
            Instance::Linear { .. } => None,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Instance::PseudoBoolean { graph, .. } => graph.as_ref(),
            Instance::Linear { .. } => None,
        }
    }
}

/// Independent 64-bit stream seed for item `index` under `base`
/// (splitmix64 finalizer over the pair).
pub fn seed_for(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn maxcut_problem(g: &Graph) -> Result<PseudoBooleanProblem> {
    let terms = g.edges().iter().flat_map(|&(a, b)| [(vec![a], 1.0), (vec![b], 1.0), (vec![a, b], -2.0)]);
    PseudoBooleanProblem::new(g.num_vertices(), terms, Sense::Maximize, ProblemMeta::new(Family::MaxCut))
}

fn staircase(k: usize) -> Result<Graph> {
    let edges = (0..k).flat_map(|i| (i..k).map(move |j| (i, k + j)));
    Graph::new(2 * k, edges)?.with_bipartition((0..2 * k).map(|v| v >= k).collect())
}

fn hobo<R: Rng>(num_vars: usize, degree: usize, num_terms: usize, rng: &mut R) -> Result<PseudoBooleanProblem> {
    if degree == 0 || degree > num_vars {
        return Err(OptError::InvalidConfig(format!("degree {degree} needs 1..={num_vars}")));
    }
    if num_terms == 0 {
        return Err(OptError::InvalidConfig("a hobo instance needs at least one term".into()));
    }
    let mut terms = Vec::with_capacity(num_terms);
    for t in 0..num_terms {
        let size = if t == 0 { degree } else { rng.gen_range(1..=degree) };
        let vars = sample(rng, num_vars, size).into_vec();
        // Keep the leading term away from zero so it cannot cancel.
        let coef = if t == 0 { rng.gen_range(0.5..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 } } else { rng.gen_range(-1.0..1.0) };
        terms.push((vars, coef));
    }
    let mut p = PseudoBooleanProblem::new(num_vars, terms, Sense::Minimize, ProblemMeta::new(Family::Hobo))?;
    // Merged duplicates can in principle cancel every top-degree term.
    if p.degree() != degree {
        let vars: Vec<usize> = (0..degree).collect();
        p = PseudoBooleanProblem::new(num_vars, p.terms().map(|(v, c)| (v.to_vec(), c)).chain([(vars, 1.0)]), Sense::Minimize, p.meta().clone())?;
    }
    Ok(p)
}

/// Deterministic instance for `(spec, seed)`.
pub fn gen_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut problem, graph) = match spec {
        InstanceSpec::MaxCut { n } => {
            let g = Graph::erdos_renyi(*n, 0.5, &mut rng);
            (maxcut_problem(&g)?, Some(g))
        }
        InstanceSpec::Matching(m) => {
            let g = match m {
                MatchingSpec::RandomBipartite { left, right, edge_probability } => {
                    if !(0.0..=1.0).contains(edge_probability) {
                        return Err(OptError::InvalidConfig(format!("edge probability {edge_probability} outside [0, 1]")));
                    }
                    Graph::random_bipartite(*left, *right, *edge_probability, &mut rng)
                }
                MatchingSpec::Staircase { k } => staircase(*k)?,
                MatchingSpec::Explicit { graph } => {
                    if graph.bipartition().is_none() {
                        return Err(OptError::NotBipartite("explicit matching graph needs a bipartition".into()));
                    }
                    graph.clone()
                }
            };
            (matching_problem(&g)?, Some(g))
        }
        InstanceSpec::Hobo { num_vars, degree, num_terms } => (hobo(*num_vars, *degree, *num_terms, &mut rng)?, None),
        InstanceSpec::Factorization { n } => (factorization_problem(*n)?, None),
        InstanceSpec::LinearSystem { dim } => {
            if *dim == 0 {
                return Err(OptError::InvalidConfig("linear system dimension must be positive".into()));
            }
            return Ok(Instance::Linear { system: LinearSystem::random(*dim, &mut rng), seed });
        }
    };
    problem.meta_mut().seed = Some(seed);
    Ok(Instance::PseudoBoolean { problem, graph })
}
