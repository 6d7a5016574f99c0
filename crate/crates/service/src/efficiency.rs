//! Energy efficiency: a performance metric divided by the energy spent.

use serde::{Deserialize, Serialize};

use crate::ServiceError;

/// Suffix of derived efficiency metric ids, e.g. `maxcut.qscore_per_joule`.
pub const PER_JOULE: &str = "_per_joule";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyMetric {
    pub metric_id: String,
    pub energy_joules: f64,
    pub efficiency: f64,
}

pub fn compute_efficiency(value: f64, energy_joules: f64) -> Result<f64, ServiceError> {
    if !(energy_joules > 0.0 && energy_joules.is_finite()) {
        return Err(ServiceError::Invalid(format!("energy must be positive and finite, got {energy_joules}")));
    }
    if !value.is_finite() {
        return Err(ServiceError::Invalid(format!("metric value {value} is not finite")));
    }
    Ok(value / energy_joules)
}

impl EfficiencyMetric {
    pub fn new(metric_id: impl Into<String>, value: f64, energy_joules: f64) -> Result<Self, ServiceError> {
        Ok(Self { metric_id: metric_id.into(), energy_joules, efficiency: compute_efficiency(value, energy_joules)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert!((compute_efficiency(140.0, 7e6).unwrap() - 2e-5).abs() < 1e-18);
        assert_eq!(compute_efficiency(0.0, 3.0).unwrap(), 0.0);
        let a = compute_efficiency(50.0, 2.0).unwrap();
        let b = compute_efficiency(50.0, 4.0).unwrap();
        assert_eq!(a, 2.0 * b);
        assert!(compute_efficiency(1.0, 0.0).is_err());
        assert!(compute_efficiency(1.0, -2.0).is_err());
        assert_eq!(EfficiencyMetric::new("m", 6.0, 3.0).unwrap().efficiency, 2.0);
    }
}
