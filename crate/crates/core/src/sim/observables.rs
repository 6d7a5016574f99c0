use std::collections::{BTreeMap, BTreeSet};

use super::pauli::{Pauli, PauliString};
use super::state::{DensityMatrix, QuantumState, C64};
use super::{Result, SimError};

/// Anything with Pauli expectation values.
pub trait Expectation {
    fn num_qubits(&self) -> usize;
    /// `<P>`; the caller guarantees `P` fits in the register.
    fn expectation(&self, p: &PauliString) -> f64;
}

impl Expectation for QuantumState {
    fn num_qubits(&self) -> usize {
        QuantumState::num_qubits(self)
    }

    fn expectation(&self, p: &PauliString) -> f64 {
        let a = self.amplitudes();
        let sum: C64 = a
            .iter()
            .enumerate()
            .map(|(b, &amp)| {
                let (t, s) = p.act(b);
                a[t].conj() * amp * s
            })
            .sum();
        (C64::i().powu(p.y_count()) * sum).re
    }
}

impl Expectation for DensityMatrix {
    fn num_qubits(&self) -> usize {
        DensityMatrix::num_qubits(self)
    }

    fn expectation(&self, p: &PauliString) -> f64 {
        // Tr(rho P) = sum_b rho[b, P(b)] * sign(b) * i^{ny}
        let rho = self.matrix();
        let sum: C64 = (0..rho.nrows())
            .map(|b| {
                let (t, s) = p.act(b);
                rho[(b, t)] * s
            })
            .sum();
        (C64::i().powu(p.y_count()) * sum).re
    }
}

/// Labelled Pauli observables of weight 1 or 2 on an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    n: usize,
    items: Vec<(String, PauliString)>,
}

impl ObservableSet {
    pub fn new(n: usize, paulis: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut items = Vec::new();
        for p in paulis {
            let label = p.to_string();
            if !(1..=2).contains(&p.weight()) {
                return Err(SimError::InvalidObservables(format!("{label} has weight {}, expected 1 or 2", p.weight())));
            }
            if p.support_len() > n {
                return Err(SimError::InvalidObservables(format!("{label} acts outside {n} qubits")));
            }
            if !seen.insert(label.clone()) {
                return Err(SimError::InvalidObservables(format!("duplicate label {label}")));
            }
            items.push((label, p));
        }
        Ok(Self { n, items })
    }

    pub fn from_labels<S: AsRef<str>>(n: usize, labels: &[S]) -> Result<Self> {
        let paulis = labels.iter().map(|l| l.as_ref().parse()).collect::<Result<Vec<PauliString>>>()?;
        Self::new(n, paulis)
    }

    /// `X_i`, `Y_i`, `Z_i` for every qubit.
    pub fn single_qubit(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|q| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| PauliString::single(q, p))))
    }

    /// Every single-qubit Pauli and every two-qubit product `P_i Q_j`, `i < j`.
    pub fn up_to_weight_two(n: usize) -> Result<Self> {
        let ops = [Pauli::X, Pauli::Y, Pauli::Z];
        let singles = (0..n).flat_map(move |q| ops.map(|p| PauliString::single(q, p)));
        let pairs = (0..n).flat_map(move |i| {
            (i + 1..n).flat_map(move |j| ops.into_iter().flat_map(move |a| ops.map(move |b| PauliString::pair(i, a, j, b))))
        });
        Self::new(n, singles.chain(pairs))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PauliString)> {
        self.items.iter().map(|(l, p)| (l.as_str(), p))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(l, _)| l.as_str())
    }
}

pub fn expectation_set<S: Expectation>(state: &S, obs: &ObservableSet) -> Result<BTreeMap<String, f64>> {
    if state.num_qubits() != obs.num_qubits() {
        return Err(SimError::DimensionMismatch(format!(
            "state has {} qubits, observables are defined on {}",
            state.num_qubits(),
            obs.num_qubits()
        )));
    }
    Ok(obs.iter().map(|(l, p)| (l.to_string(), state.expectation(p))).collect())
}

/// `G = sum_a |m_a - o_a|` over identical label sets.
pub fn infidelity_proxy(measured: &BTreeMap<String, f64>, ideal: &BTreeMap<String, f64>) -> Result<f64> {
    let extra: Vec<&str> = measured.keys().filter(|k| !ideal.contains_key(*k)).map(String::as_str).collect();
    let missing: Vec<&str> = ideal.keys().filter(|k| !measured.contains_key(*k)).map(String::as_str).collect();
    if !extra.is_empty() || !missing.is_empty() {
        return Err(SimError::LabelMismatch(format!("unexpected [{}], missing [{}]", extra.join(", "), missing.join(", "))));
    }
    if let Some((l, v)) = measured.iter().find(|(_, v)| !v.is_finite()) {
        return Err(SimError::InvalidObservables(format!("measured {l} = {v} is not finite")));
    }
    Ok(measured.iter().map(|(k, m)| (m - ideal[k]).abs()).sum())
}

/// `F = <psi| rho |psi>`.
pub fn fidelity(rho: &DensityMatrix, psi: &QuantumState) -> Result<f64> {
    if rho.num_qubits() != psi.num_qubits() {
        return Err(SimError::DimensionMismatch(format!("{} vs {} qubits", rho.num_qubits(), psi.num_qubits())));
    }
    let a = psi.amplitudes();
    let m = rho.matrix();
    let mut f = C64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        let row: C64 = a.iter().enumerate().map(|(j, aj)| m[(i, j)] * aj).sum();
        f += ai.conj() * row;
    }
    Ok(f.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> QuantumState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::new(vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)]).unwrap()
    }

    #[test]
    fn all_zero_state() {
        let psi = QuantumState::basis(3, 0).unwrap();
        let e = expectation_set(&psi, &ObservableSet::single_qubit(3).unwrap()).unwrap();
        for (l, v) in e {
            let want = if l.starts_with('Z') { 1.0 } else { 0.0 };
            assert_eq!(v, want, "{l}");
        }
    }

    #[test]
    fn bell_state() {
        let obs = ObservableSet::from_labels(2, &["Z0Z1", "X0X1", "Y0Y1", "Z0", "X0"]).unwrap();
        let e = expectation_set(&bell(), &obs).unwrap();
        assert_abs_diff_eq!(e["Z0Z1"], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e["X0X1"], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e["Y0Y1"], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e["Z0"], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e["X0"], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn maximally_mixed_expectations_vanish() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let e = expectation_set(&rho, &ObservableSet::up_to_weight_two(3).unwrap()).unwrap();
        assert_eq!(e.len(), 9 + 3 * 9);
        assert!(e.values().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_density_matches_vector() {
        let psi = QuantumState::random(3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let rho = DensityMatrix::pure(&psi).unwrap();
        let obs = ObservableSet::up_to_weight_two(3).unwrap();
        let a = expectation_set(&psi, &obs).unwrap();
        let b = expectation_set(&rho, &obs).unwrap();
        for (k, v) in &a {
            assert_abs_diff_eq!(*v, b[k], epsilon = 1e-12);
            assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn observable_validation() {
        assert!(ObservableSet::from_labels(2, &["X0", "X0"]).is_err());
        assert!(ObservableSet::from_labels(2, &["X0Y1Z2"]).is_err());
        assert!(ObservableSet::from_labels(2, &["X2"]).is_err());
        assert!(ObservableSet::from_labels(2, &["I"]).is_err());
        let psi = QuantumState::basis(2, 0).unwrap();
        assert!(expectation_set(&psi, &ObservableSet::single_qubit(3).unwrap()).is_err());
    }

    #[test]
    fn proxy() {
        let ideal: BTreeMap<String, f64> = [("X0".to_string(), 0.5), ("Z0".to_string(), -0.2)].into();
        assert_eq!(infidelity_proxy(&ideal, &ideal).unwrap(), 0.0);
        let mut m = ideal.clone();
        *m.get_mut("X0").unwrap() += 0.1;
        assert_abs_diff_eq!(infidelity_proxy(&m, &ideal).unwrap(), 0.1, epsilon = 1e-15);
        m.insert("Y0".into(), 0.0);
        assert!(matches!(infidelity_proxy(&m, &ideal), Err(SimError::LabelMismatch(_))));
    }

    #[test]
    fn fidelity_cases() {
        let psi = bell();
        assert_abs_diff_eq!(fidelity(&DensityMatrix::pure(&psi).unwrap(), &psi).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(fidelity(&DensityMatrix::maximally_mixed(2).unwrap(), &QuantumState::basis(2, 0).unwrap()).unwrap(), 0.25);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let orth = QuantumState::new(vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-h, 0.0)]).unwrap();
        assert_abs_diff_eq!(fidelity(&DensityMatrix::pure(&orth).unwrap(), &psi).unwrap(), 0.0, epsilon = 1e-15);
        for p in [0.0, 0.1, 0.5, 1.0] {
            let rho = DensityMatrix::depolarized(&psi, p).unwrap();
            assert_abs_diff_eq!(fidelity(&rho, &psi).unwrap(), 1.0 - p * 0.75, epsilon = 1e-12);
        }
    }
}
