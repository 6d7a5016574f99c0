mod anneal;
mod exhaustive;
mod external;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use external::{AdapterConfig, AdapterReply};

use super::problem::{Assignment, PseudoBooleanProblem};
use super::{OptError, Result};
use crate::par::Execution;

pub const MAX_EXHAUSTIVE_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SolverSpec {
    /// One uniform assignment: the null baseline every backend must beat.
    Random,
    Exhaustive,
    SimulatedAnnealing {
        sweeps: usize,
        restarts: usize,
        /// Final temperature as a fraction of the initial one.
        #[serde(default = "default_final_ratio")]
        final_ratio: f64,
    },
    External(AdapterConfig),
}

fn default_final_ratio() -> f64 {
    1e-3
}

impl SolverSpec {
    pub fn annealing(sweeps: usize, restarts: usize) -> Self {
        SolverSpec::SimulatedAnnealing { sweeps, restarts, final_ratio: default_final_ratio() }
    }

    pub fn name(&self) -> String {
        match self {
            SolverSpec::Random => "random".into(),
            SolverSpec::Exhaustive => "exhaustive".into(),
            SolverSpec::SimulatedAnnealing { sweeps, restarts, .. } => format!("simulated_annealing({sweeps}x{restarts})"),
            SolverSpec::External(cfg) => format!("external({})", cfg.command),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub assignment: Assignment,
    pub objective: f64,
    pub solver: String,
    pub wall_clock_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_joules: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// Problem rewritten as an energy to minimise, with per-variable term lists
/// for incremental flip deltas.
pub(crate) struct Compiled {
    pub n: usize,
    constant: f64,
    terms: Vec<(Vec<usize>, f64)>,
    by_var: Vec<Vec<usize>>,
}

impl Compiled {
    pub fn new(p: &PseudoBooleanProblem) -> Self {
        let sign = p.sense().energy_sign();
        let mut constant = 0.0;
        let mut terms = Vec::new();
        let mut by_var = vec![Vec::new(); p.num_vars()];
        for (vars, c) in p.terms() {
            if vars.is_empty() {
                constant += sign * c;
                continue;
            }
            for &v in vars {
                by_var[v].push(terms.len());
            }
            terms.push((vars.to_vec(), sign * c));
        }
        Self { n: p.num_vars(), constant, terms, by_var }
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        self.constant + self.terms.iter().filter(|(v, _)| v.iter().all(|&i| bits[i])).map(|(_, c)| c).sum::<f64>()
    }

    /// Energy change from flipping bit `i`.
    pub fn delta(&self, bits: &[bool], i: usize) -> f64 {
        let mut d = 0.0;
        for &t in &self.by_var[i] {
            let (vars, c) = &self.terms[t];
            if vars.iter().all(|&j| j == i || bits[j]) {
                d += c;
            }
        }
        if bits[i] {
            -d
        } else {
            d
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

pub fn solve(p: &PseudoBooleanProblem, spec: &SolverSpec, seed: u64, exec: Execution) -> Result<Solution> {
    let start = Instant::now();
    let (assignment, energy_joules, metadata) = match spec {
        SolverSpec::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (Assignment::new((0..p.num_vars()).map(|_| rng.gen()).collect()), None, None)
        }
        SolverSpec::Exhaustive => {
            if p.num_vars() > MAX_EXHAUSTIVE_VARS {
                return Err(OptError::TooLargeForExhaustive { num_vars: p.num_vars(), max: MAX_EXHAUSTIVE_VARS });
            }
            (exhaustive::search(&Compiled::new(p), exec), None, None)
        }
        SolverSpec::SimulatedAnnealing { sweeps, restarts, final_ratio } => {
            if *sweeps == 0 || *restarts == 0 {
                return Err(OptError::InvalidConfig("annealing needs at least one sweep and one restart".into()));
            }
            if !(*final_ratio > 0.0 && *final_ratio <= 1.0) {
                return Err(OptError::InvalidConfig(format!("final temperature ratio {final_ratio} outside (0, 1]")));
            }
            (anneal::anneal(&Compiled::new(p), *sweeps, *restarts, *final_ratio, seed, exec), None, None)
        }
        SolverSpec::External(cfg) => {
            let reply = external::run(cfg, p)?;
            let wall = reply.wall_clock_seconds;
            let objective = p.evaluate(&reply.assignment)?;
            return Ok(Solution {
                assignment: reply.assignment,
                objective,
                solver: spec.name(),
                wall_clock_seconds: wall,
                energy_joules: reply.energy_joules,
                metadata: reply.solver,
            });
        }
    };
    let objective = p.evaluate(&assignment)?;
    Ok(Solution {
        assignment,
        objective,
        solver: spec.name(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        energy_joules,
        metadata,
    })
}
