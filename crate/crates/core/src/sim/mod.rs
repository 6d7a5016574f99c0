//! Exact reference simulation of small spin chains (ħ = 1).
//!
//! Hamiltonians are real combinations of Pauli strings. Time evolution is
//! either exact (dense eigendecomposition, limited to
//! [`MAX_DENSE_QUBITS`]) or first-order Trotter (sparse, up to
//! [`MAX_QUBITS`]). Device results are compared to the ideal state through
//! Pauli expectation values and the fidelity.

mod document;
mod evolve;
mod hamiltonian;
mod observables;
mod pauli;
mod state;

pub use document::{ideal_document, score_measurement, LabeledValue, SimDocument, SimScore};
pub use evolve::{evolve, expectation_series, ground_state, EvolutionMethod, GroundState, Propagator};
pub use hamiltonian::{Boundary, CustomTerm, ModelSpec, SpinSystem};
pub use observables::{expectation_set, fidelity, infidelity_proxy, Expectation, ObservableSet};
pub use pauli::{Pauli, PauliString};
pub use state::{DensityMatrix, QuantumState, C64};

use thiserror::Error;

/// Largest register accepted anywhere in the module.
pub const MAX_QUBITS: usize = 14;
/// Largest register for dense matrices (exact evolution, ground states,
/// density matrices): 2^12 x 2^12 complex entries is 256 MiB.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Tolerance on norms, traces and Hermiticity.
pub const STATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{found} qubits exceeds the limit of {max}")]
    TooManyQubits { found: usize, max: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("term {pauli} has imaginary coefficient {imag}; Hamiltonian would not be Hermitian")]
    NonHermitian { pauli: String, imag: f64 },
    #[error("invalid Pauli string `{0}`")]
    InvalidPauli(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid observable set: {0}")]
    InvalidObservables(String),
    #[error("label sets differ: {0}")]
    LabelMismatch(String),
    #[error("invalid evolution: {0}")]
    InvalidEvolution(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
