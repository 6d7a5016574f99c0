use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::state::{QuantumState, C64};
use super::{Result, SimError, MAX_DENSE_QUBITS, MAX_QUBITS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomTerm {
    pub coef: f64,
    /// Imaginary part of the coefficient; anything but 0 is rejected.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub imag: f64,
    pub pauli: PauliString,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `sum_i X_i X_{i+1} + Y_i Y_{i+1}`.
    Xy {
        n: usize,
        #[serde(default)]
        boundary: Boundary,
    },
    /// `-sum_i Z_i Z_{i+1} - g sum_i X_i`.
    TransverseFieldIsing {
        n: usize,
        g: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    /// `sum_i X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}`.
    Xxz {
        n: usize,
        delta: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    Custom { n: usize, terms: Vec<CustomTerm> },
}

impl ModelSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            ModelSpec::Xy { n, .. } | ModelSpec::TransverseFieldIsing { n, .. } | ModelSpec::Xxz { n, .. } | ModelSpec::Custom { n, .. } => *n,
        }
    }

    pub fn build(&self) -> Result<SpinSystem> {
        SpinSystem::new(self.clone())
    }
}

/// Hamiltonian `H = sum_k c_k P_k` with real `c_k`, hence Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    model: ModelSpec,
    terms: Vec<(f64, PauliString)>,
}

fn bonds(n: usize, boundary: Boundary) -> Result<Vec<(usize, usize)>> {
    let mut b: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        if n < 3 {
            return Err(SimError::InvalidModel(format!("periodic boundary needs at least 3 sites, got {n}")));
        }
        b.push((n - 1, 0));
    }
    Ok(b)
}

impl SpinSystem {
    pub fn new(model: ModelSpec) -> Result<Self> {
        let n = model.num_qubits();
        if n == 0 {
            return Err(SimError::InvalidModel("no qubits".into()));
        }
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits { found: n, max: MAX_QUBITS });
        }
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(SimError::InvalidModel(format!("{name} = {v} is not finite")))
            }
        };
        let mut terms = Vec::new();
        match &model {
            ModelSpec::Xy { boundary, .. } => {
                for (a, b) in bonds(n, *boundary)? {
                    terms.push((1.0, PauliString::pair(a, Pauli::X, b, Pauli::X)));
                    terms.push((1.0, PauliString::pair(a, Pauli::Y, b, Pauli::Y)));
                }
            }
            ModelSpec::TransverseFieldIsing { g, boundary, .. } => {
                let g = finite("g", *g)?;
                for (a, b) in bonds(n, *boundary)? {
                    terms.push((-1.0, PauliString::pair(a, Pauli::Z, b, Pauli::Z)));
                }
                if g != 0.0 {
                    for i in 0..n {
                        terms.push((-g, PauliString::single(i, Pauli::X)));
                    }
                }
            }
            ModelSpec::Xxz { delta, boundary, .. } => {
                let delta = finite("delta", *delta)?;
                for (a, b) in bonds(n, *boundary)? {
                    terms.push((1.0, PauliString::pair(a, Pauli::X, b, Pauli::X)));
                    terms.push((1.0, PauliString::pair(a, Pauli::Y, b, Pauli::Y)));
                    if delta != 0.0 {
                        terms.push((delta, PauliString::pair(a, Pauli::Z, b, Pauli::Z)));
                    }
                }
            }
            ModelSpec::Custom { terms: custom, .. } => {
                for t in custom {
                    if t.imag != 0.0 {
                        return Err(SimError::NonHermitian { pauli: t.pauli.to_string(), imag: t.imag });
                    }
                    finite("coefficient", t.coef)?;
                    if t.pauli.support_len() > n {
                        return Err(SimError::InvalidModel(format!("term {} acts outside {n} qubits", t.pauli)));
                    }
                    terms.push((t.coef, t.pauli));
                }
            }
        }
        Ok(Self { model, terms })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn num_qubits(&self) -> usize {
        self.model.num_qubits()
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// True when every term has an even number of Y factors.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_real())
    }

    /// `H |psi>` without forming the matrix.
    pub fn apply(&self, psi: &QuantumState) -> Result<Vec<C64>> {
        self.check(psi)?;
        let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
        for &(c, p) in &self.terms {
            let phase = C64::i().powu(p.y_count()) * c;
            for (b, &a) in psi.amplitudes().iter().enumerate() {
                let (t, s) = p.act(b);
                out[t] += phase * s * a;
            }
        }
        Ok(out)
    }

    /// `<psi|H|psi>`.
    pub fn energy(&self, psi: &QuantumState) -> Result<f64> {
        let h = self.apply(psi)?;
        Ok(psi.amplitudes().iter().zip(&h).map(|(a, b)| a.conj() * b).sum::<C64>().re)
    }

    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        self.check_dense()?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for &(c, p) in &self.terms {
            let phase = C64::i().powu(p.y_count()) * c;
            for b in 0..d {
                let (t, s) = p.act(b);
                m[(t, b)] += phase * s;
            }
        }
        Ok(m)
    }

    /// Real symmetric matrix, available when [`SpinSystem::is_real`].
    pub fn real_matrix(&self) -> Result<Option<DMatrix<f64>>> {
        self.check_dense()?;
        if !self.is_real() {
            return Ok(None);
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for &(c, p) in &self.terms {
            // i^{ny} is +1 or -1 for an even number of Y factors
            let phase = if p.y_count() % 4 == 0 { c } else { -c };
            for b in 0..d {
                let (t, s) = p.act(b);
                m[(t, b)] += phase * s;
            }
        }
        Ok(Some(m))
    }

    pub(crate) fn check(&self, psi: &QuantumState) -> Result<()> {
        if psi.num_qubits() != self.num_qubits() {
            return Err(SimError::DimensionMismatch(format!(
                "state has {} qubits, Hamiltonian has {}",
                psi.num_qubits(),
                self.num_qubits()
            )));
        }
        Ok(())
    }

    fn check_dense(&self) -> Result<()> {
        if self.num_qubits() > MAX_DENSE_QUBITS {
            return Err(SimError::TooManyQubits { found: self.num_qubits(), max: MAX_DENSE_QUBITS });
        }
        Ok(())
    }
}
