//! Application-level benchmarks for compute backends and the hierarchical
//! multi-criteria model used to score and compare them.
//!
//! The crate is organised by concern:
//!
//! - [`mcda`]: criteria trees, piecewise-linear utilities, 2-additive Choquet
//!   aggregation, point and interval evaluation.
//! - [`elicitation`]: turning rankings and intensity labels into utility
//!   functions and Choquet capacities.
//! - [`explanation`]: contrastive Shapley contributions down the hierarchy.
//! - [`opt`]: pseudo-Boolean benchmark families (MaxCut / Q-score, matching,
//!   HOBO, factorization), reference solvers and exact oracles.
//! - [`sim`]: exact spin-chain simulation used as the reference for the
//!   quantum-simulation benchmark family.
//!
//! Batch workloads (Q-score sweeps, annealing restarts, exhaustive search,
//! profile batches) run on rayon when the `parallel` feature is enabled and
//! fall back to plain iterators otherwise; see [`par`].

pub mod elicitation;
pub mod explanation;
pub mod mcda;
pub mod opt;
pub mod par;
pub mod sim;

/// Version tag written into every persisted document.
pub const SCHEMA_VERSION: u32 = 1;
