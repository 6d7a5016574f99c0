use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::evolve::{evolve, EvolutionMethod};
use super::hamiltonian::ModelSpec;
use super::observables::{expectation_set, infidelity_proxy, ObservableSet};
use super::state::QuantumState;
use super::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledValue {
    pub label: String,
    pub value: f64,
}

/// Shared format for ideal exports and device measurements: the model, the
/// product initial state (character `i` is qubit `i`), the evolution time
/// and one value per observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDocument {
    pub model: ModelSpec,
    pub initial_state: String,
    pub t: f64,
    pub values: Vec<LabeledValue>,
    /// Device-reported fidelity estimate, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

impl SimDocument {
    pub fn value_map(&self) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for v in &self.values {
            if out.insert(v.label.clone(), v.value).is_some() {
                return Err(SimError::InvalidObservables(format!("duplicate label {}", v.label)));
            }
        }
        Ok(out)
    }

    fn observables(&self) -> Result<ObservableSet> {
        let labels: Vec<&str> = self.values.iter().map(|v| v.label.as_str()).collect();
        ObservableSet::from_labels(self.model.num_qubits(), &labels)
    }
}

/// Ideal expectation values of `obs` after evolving the product state.
pub fn ideal_document(model: &ModelSpec, initial_state: &str, t: f64, obs: &ObservableSet, method: EvolutionMethod) -> Result<SimDocument> {
    let h = model.build()?;
    let psi0 = QuantumState::product(initial_state)?;
    let psi = evolve(&h, &psi0, t, method)?;
    let values = expectation_set(&psi, obs)?.into_iter().map(|(label, value)| LabeledValue { label, value }).collect();
    Ok(SimDocument { model: model.clone(), initial_state: initial_state.to_string(), t, values, fidelity: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScore {
    /// Infidelity proxy, reported raw.
    pub g: f64,
    pub observable_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

/// Scores a measurement document against exact evolution of its own model,
/// initial state, time and label set.
pub fn score_measurement(measured: &SimDocument) -> Result<SimScore> {
    let obs = measured.observables()?;
    let ideal = ideal_document(&measured.model, &measured.initial_state, measured.t, &obs, EvolutionMethod::Exact)?;
    let g = infidelity_proxy(&measured.value_map()?, &ideal.value_map()?)?;
    if let Some(f) = measured.fidelity {
        if !(-1e-9..=1.0 + 1e-9).contains(&f) {
            return Err(SimError::InvalidObservables(format!("reported fidelity {f} outside [0, 1]")));
        }
    }
    Ok(SimScore { g, observable_count: obs.len(), fidelity: measured.fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::hamiltonian::Boundary;

    fn model() -> ModelSpec {
        ModelSpec::TransverseFieldIsing { n: 3, g: 0.8, boundary: Boundary::Open }
    }

    #[test]
    fn ideal_scores_zero() {
        let obs = ObservableSet::up_to_weight_two(3).unwrap();
        let doc = ideal_document(&model(), "010", 0.7, &obs, EvolutionMethod::Exact).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back: SimDocument = serde_json::from_str(&json).unwrap();
        let s = score_measurement(&back).unwrap();
        assert_eq!(s.observable_count, obs.len());
        assert!(s.g < 1e-12);
    }

    #[test]
    fn perturbed_measurement() {
        let obs = ObservableSet::single_qubit(3).unwrap();
        let mut doc = ideal_document(&model(), "000", 0.2, &obs, EvolutionMethod::Exact).unwrap();
        doc.values[0].value += 0.25;
        doc.fidelity = Some(0.9);
        let s = score_measurement(&doc).unwrap();
        assert!((s.g - 0.25).abs() < 1e-12);
        assert_eq!(s.fidelity, Some(0.9));
        doc.values.push(doc.values[0].clone());
        assert!(score_measurement(&doc).is_err());
    }
}
