use serde::{Deserialize, Serialize};

use super::{check_consistency, derive_value_scale, ElicitationError, Gap, Result, Session};
use crate::mcda::{Breakpoint, Direction, MetricId, UtilityFunction};

/// Answers collected for one metric: elements ranked worst first, the gap
/// label between each consecutive pair, and the two reference levels.
/// The Bad level must be the first element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilitySession {
    pub metric_id: MetricId,
    pub elements: Vec<f64>,
    pub gaps: Vec<Gap>,
    pub bad: f64,
    pub good: f64,
}

impl UtilitySession {
    pub fn new(metric_id: impl Into<MetricId>, elements: Vec<f64>, gaps: Vec<Gap>, good: f64) -> Self {
        let bad = elements.first().copied().unwrap_or(f64::NAN);
        Self { metric_id: metric_id.into(), elements, gaps, bad, good }
    }

    /// Direction implied by the ranking, if the metric is monotone in it.
    pub fn direction(&self) -> Option<Direction> {
        let e = &self.elements;
        if e.windows(2).all(|w| w[1] > w[0]) {
            Some(Direction::HigherIsBetter)
        } else if e.windows(2).all(|w| w[1] < w[0]) {
            Some(Direction::LowerIsBetter)
        } else {
            None
        }
    }
}

pub fn derive_utility_function(session: &UtilitySession) -> Result<UtilityFunction> {
    let violations = check_consistency(&Session::Utility(session.clone()));
    if !violations.is_empty() {
        return Err(ElicitationError::InvalidSession(violations));
    }
    let direction = session.direction().ok_or_else(|| ElicitationError::NotMonotone(session.metric_id.clone()))?;
    let utilities = derive_value_scale(&session.elements, &session.gaps, &session.bad, &session.good)?;
    let good_index = session.elements.iter().position(|&e| e == session.good).expect("checked above");
    let breakpoints = session.elements.iter().zip(utilities).map(|(&v, u)| Breakpoint::new(v, u)).collect();
    Ok(UtilityFunction::new(session.metric_id.clone(), direction, breakpoints, 0, good_index)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elicitation::IntensityLabel::*;
    use crate::elicitation::ViolationKind;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn maxcut_session() -> UtilitySession {
        UtilitySession::new(
            "maxcut",
            vec![0.0, 17.0, 70.0, 140.0, 1000.0],
            vec![Weak.into(), Strong.into(), Strong.into(), VeryStrong.into()],
            1000.0,
        )
    }

    #[test]
    fn maxcut_session_gives_reference_table() {
        let f = derive_utility_function(&maxcut_session()).unwrap();
        assert_eq!(f.direction, Direction::HigherIsBetter);
        let u: Vec<f64> = f.breakpoints.iter().map(|b| b.utility).collect();
        for (a, b) in u.iter().zip([0.0, 0.133, 0.4, 0.667, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-3);
        }
        assert_eq!(f.good_value(), 1000.0);
    }

    #[test]
    fn maxclique_fixture() {
        // The intensities are a test fixture chosen to equal the MaxCut ones.
        let s = UtilitySession::new(
            "maxclique",
            vec![0.0, 12.0, 70.0, 110.0, 1000.0],
            vec![Weak.into(), Strong.into(), Strong.into(), VeryStrong.into()],
            1000.0,
        );
        let f = derive_utility_function(&s).unwrap();
        let u: Vec<f64> = f.breakpoints.iter().map(|b| b.utility).collect();
        for (a, b) in u.iter().zip([0.0, 2.0 / 15.0, 0.4, 2.0 / 3.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn lower_is_better_metric() {
        let s = UtilitySession::new("latency_ms", vec![100.0, 10.0, 1.0], vec![Moderate.into(), Moderate.into()], 1.0);
        let f = derive_utility_function(&s).unwrap();
        assert_eq!(f.direction, Direction::LowerIsBetter);
        assert_eq!(f.apply(1.0).unwrap(), 1.0);
        assert_eq!(f.apply(100.0).unwrap(), 0.0);
    }

    #[test]
    fn good_below_best_element() {
        let s = UtilitySession::new("m", vec![0.0, 10.0, 20.0], vec![Weak.into(), Weak.into()], 10.0);
        let f = derive_utility_function(&s).unwrap();
        assert_eq!(f.breakpoints[2].utility, 2.0);
    }

    #[test]
    fn rejects_non_monotone_metric() {
        let s = UtilitySession::new("m", vec![0.0, 50.0, 20.0], vec![Weak.into(), Weak.into()], 20.0);
        match derive_utility_function(&s) {
            Err(ElicitationError::InvalidSession(v)) => assert!(v.iter().any(|x| x.kind == ViolationKind::NotMonotone)),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        // Sessions built from an existing function with proportional gaps
        // recover its breakpoints.
        #[test]
        fn round_trips_breakpoints(steps in prop::collection::vec(1u8..=6, 1..7), good_pos in 0usize..7) {
            let n = steps.len() + 1;
            let good_pos = 1 + good_pos % (n - 1);
            let cum: Vec<f64> = std::iter::once(0.0).chain(steps.iter().scan(0.0, |a, &s| { *a += s as f64; Some(*a) })).collect();
            let span = cum[good_pos];
            let pairs: Vec<(f64, f64)> = cum.iter().enumerate().map(|(i, c)| (10.0 * i as f64, c / span)).collect();
            let original = UtilityFunction::from_pairs("m", Direction::HigherIsBetter, &pairs).unwrap();
            let gaps: Vec<Gap> = steps.iter().map(|&s| Gap::Prefer(crate::elicitation::IntensityLabel::from_value(s).unwrap())).collect();
            let session = UtilitySession::new("m", pairs.iter().map(|p| p.0).collect(), gaps, pairs[good_pos].0);
            let derived = derive_utility_function(&session).unwrap();
            prop_assert_eq!(derived.good_index, original.good_index);
            for (a, b) in derived.breakpoints.iter().zip(&original.breakpoints) {
                prop_assert_eq!(a.value, b.value);
                prop_assert!((a.utility - b.utility).abs() < 1e-12);
            }
        }
    }
}
