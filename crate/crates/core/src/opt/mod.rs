//! Optimization benchmark families and their reference solvers.
//!
//! Every family except linear systems is encoded as a
//! [`PseudoBooleanProblem`]: a multilinear polynomial over binary variables.
//! Solvers range from the uniform random machine (the null baseline) through
//! exhaustive search (the exact oracle, up to 24 variables) to simulated
//! annealing and an out-of-process adapter for external backends.

mod factor;
mod generate;
mod graph;
mod linear;
mod matching;
mod problem;
mod qscore;
mod quadratize;
mod solve;

pub use factor::{decode_factors, factorization_problem, FactorEncoding, FactorDecoding};
pub use generate::{gen_instance, maxcut_problem, seed_for, Instance, InstanceSpec, MatchingSpec};
pub use graph::Graph;
pub use linear::{linear_residual, solve_linear_system, LinearSystem};
pub use matching::{decode_matching, matching_oracle, matching_problem};
pub use problem::{Assignment, Family, Polynomial, ProblemMeta, PseudoBooleanProblem, Sense, Term};
pub use qscore::{beta_score, qscore, InstanceRun, QScoreConfig, QScoreReport, RandomBaseline, SizeResult};
pub use quadratize::{default_penalty, quadratize};
pub use solve::{solve, AdapterConfig, AdapterReply, Solution, SolverSpec, MAX_EXHAUSTIVE_VARS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("assignment has {found} bits, problem has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exhaustive search is limited to {max} variables, problem has {num_vars}")]
    TooLargeForExhaustive { num_vars: usize, max: usize },
    #[error("problem already has degree {0}; quadratization needs degree 3 or more")]
    AlreadyQuadratic(usize),
    #[error("penalty must be positive and finite, got {0}")]
    InvalidPenalty(f64),
    #[error("cannot factor {0}: {1}")]
    InvalidModulus(u64, &'static str),
    #[error("expected a {expected} problem, found {found}")]
    FamilyMismatch { expected: Family, found: Family },
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("right-hand side is the zero vector")]
    ZeroRhs,
    #[error("linear system is singular")]
    Singular,
    #[error("external solver timed out after {0:.1} s")]
    AdapterTimeout(f64),
    #[error("external solver protocol violation: {0}")]
    AdapterProtocol(String),
    #[error("external solver i/o: {0}")]
    AdapterIo(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("q-score run aborted at n = {n}: {reason}")]
    QScoreAborted { n: usize, reason: String, partial: Box<QScoreReport> },
}

pub type Result<T, E = OptError> = std::result::Result<T, E>;
