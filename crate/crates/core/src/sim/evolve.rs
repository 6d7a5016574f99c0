use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::hamiltonian::SpinSystem;
use super::observables::{expectation_set, ObservableSet};
use super::state::{QuantumState, C64};
use super::{Result, SimError};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EvolutionMethod {
    Exact,
    /// First-order product of per-term exponentials over `steps` slices.
    Trotter { steps: usize },
}

/// Spectral decomposition of `H`, reusable across evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: usize,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &SpinSystem) -> Result<Self> {
        let (energies, vectors) = match h.real_matrix()? {
            Some(m) => {
                let eig = SymmetricEigen::new(m);
                (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| C64::new(x, 0.0)))
            }
            None => {
                let eig = SymmetricEigen::new(h.matrix()?);
                (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
            }
        };
        Ok(Self { n: h.num_qubits(), energies, vectors })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `exp(-i H t) |psi>`.
    pub fn evolve(&self, psi: &QuantumState, t: f64) -> Result<QuantumState> {
        if psi.num_qubits() != self.n {
            return Err(SimError::DimensionMismatch(format!("state has {} qubits, propagator has {}", psi.num_qubits(), self.n)));
        }
        if !t.is_finite() {
            return Err(SimError::InvalidEvolution(format!("time {t} is not finite")));
        }
        let mut c = self.vectors.ad_mul(&DVector::from_column_slice(psi.amplitudes()));
        for (ck, &e) in c.iter_mut().zip(&self.energies) {
            *ck *= C64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * c;
        Ok(QuantumState::from_raw(self.n, out.iter().copied().collect()))
    }

    fn ground(&self) -> GroundState {
        let mut order: Vec<usize> = (0..self.energies.len()).collect();
        order.sort_by(|&a, &b| self.energies[a].total_cmp(&self.energies[b]));
        let k = order[0];
        let gap = order.get(1).map_or(f64::INFINITY, |&j| self.energies[j] - self.energies[k]);
        let amps = self.vectors.column(k).iter().copied().collect();
        GroundState {
            energy: self.energies[k],
            state: QuantumState::normalized(amps).expect("eigenvector is nonzero"),
            gap,
            degenerate: gap < DEGENERACY_GAP,
        }
    }
}

const DEGENERACY_GAP: f64 = 1e-9;

fn trotter(h: &SpinSystem, psi: &QuantumState, t: f64, steps: usize) -> Result<QuantumState> {
    if steps == 0 {
        return Err(SimError::InvalidEvolution("Trotter evolution needs at least one step".into()));
    }
    let dt = t / steps as f64;
    let mut cur = psi.amplitudes().to_vec();
    let mut next = vec![C64::new(0.0, 0.0); cur.len()];
    for _ in 0..steps {
        for &(c, p) in h.terms() {
            // exp(-i c dt P) = cos(c dt) - i sin(c dt) P since P^2 = 1
            let (s, co) = (c * dt).sin_cos();
            let k = C64::new(0.0, -s) * C64::i().powu(p.y_count());
            for (b, &a) in cur.iter().enumerate() {
                let (tgt, sign) = p.act(b);
                next[tgt] = co * cur[tgt] + k * sign * a;
            }
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(QuantumState::from_raw(psi.num_qubits(), cur))
}

pub fn evolve(h: &SpinSystem, psi: &QuantumState, t: f64, method: EvolutionMethod) -> Result<QuantumState> {
    h.check(psi)?;
    if !t.is_finite() {
        return Err(SimError::InvalidEvolution(format!("time {t} is not finite")));
    }
    match method {
        EvolutionMethod::Exact => Propagator::new(h)?.evolve(psi, t),
        EvolutionMethod::Trotter { steps } => trotter(h, psi, t, steps),
    }
}

/// Ideal expectation values at each time, evaluated independently per time.
pub fn expectation_series(
    prop: &Propagator,
    psi: &QuantumState,
    times: &[f64],
    obs: &ObservableSet,
    exec: Execution,
) -> Result<Vec<BTreeMap<String, f64>>> {
    exec.try_map(times.to_vec(), |t| expectation_set(&prop.evolve(psi, t)?, obs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: QuantumState,
    /// Distance to the next eigenvalue.
    pub gap: f64,
    /// Set when the gap is below 1e-9; `state` is then one member of the
    /// ground space.
    pub degenerate: bool,
}

pub fn ground_state(h: &SpinSystem) -> Result<GroundState> {
    Ok(Propagator::new(h)?.ground())
}
