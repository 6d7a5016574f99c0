use serde::{Deserialize, Serialize};

use super::{McdaError, MetricId, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

impl Direction {
    /// Maps a metric value onto an axis where larger is always preferred.
    /// Negation is exact, so breakpoints stay exact in oriented form.
    #[inline]
    pub fn orient(self, value: f64) -> f64 {
        match self {
            Direction::HigherIsBetter => value,
            Direction::LowerIsBetter => -value,
        }
    }

    /// `a` strictly preferred to `b`.
    pub fn prefers(self, a: f64, b: f64) -> bool {
        self.orient(a) > self.orient(b)
    }

    pub fn better(self, a: f64, b: f64) -> f64 {
        if self.prefers(b, a) {
            b
        } else {
            a
        }
    }

    pub fn worse(self, a: f64, b: f64) -> f64 {
        if self.prefers(b, a) {
            a
        } else {
            b
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub value: f64,
    pub utility: f64,
}

impl Breakpoint {
    pub fn new(value: f64, utility: f64) -> Self {
        Self { value, utility }
    }
}

/// Piecewise-linear marginal utility of one metric.
///
/// Breakpoints are listed worst first. The Bad breakpoint carries utility 0
/// and the Good breakpoint utility 1; breakpoints beyond Good may exceed 1.
/// Values less preferred than Bad clamp to 0 and values beyond the best
/// breakpoint extrapolate with the slope of the last segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityFunction {
    pub metric_id: MetricId,
    pub direction: Direction,
    pub breakpoints: Vec<Breakpoint>,
    pub bad_index: usize,
    pub good_index: usize,
}

impl UtilityFunction {
    pub fn new(
        metric_id: impl Into<MetricId>,
        direction: Direction,
        breakpoints: Vec<Breakpoint>,
        bad_index: usize,
        good_index: usize,
    ) -> Result<Self> {
        let f = Self { metric_id: metric_id.into(), direction, breakpoints, bad_index, good_index };
        f.validate()?;
        Ok(f)
    }

    /// Builds a function from `(value, utility)` pairs, locating the anchors
    /// at the breakpoints whose utilities are exactly 0 and 1.
    pub fn from_pairs(metric_id: impl Into<MetricId>, direction: Direction, pairs: &[(f64, f64)]) -> Result<Self> {
        let metric_id = metric_id.into();
        let find = |u: f64| {
            pairs.iter().position(|&(_, x)| x == u).ok_or_else(|| McdaError::InvalidUtility {
                metric: metric_id.clone(),
                reason: format!("no breakpoint with utility {u}"),
            })
        };
        let bad = find(0.0)?;
        let good = find(1.0)?;
        let breakpoints = pairs.iter().map(|&(v, u)| Breakpoint::new(v, u)).collect();
        Self::new(metric_id, direction, breakpoints, bad, good)
    }

    fn invalid(&self, reason: impl Into<String>) -> McdaError {
        McdaError::InvalidUtility { metric: self.metric_id.clone(), reason: reason.into() }
    }

    pub fn validate(&self) -> Result<()> {
        let bps = &self.breakpoints;
        if bps.len() < 2 {
            return Err(self.invalid("at least two breakpoints (Bad and Good) are required"));
        }
        if self.bad_index >= bps.len() || self.good_index >= bps.len() {
            return Err(self.invalid("anchor index out of range"));
        }
        for (i, bp) in bps.iter().enumerate() {
            if !bp.value.is_finite() || !bp.utility.is_finite() {
                return Err(self.invalid(format!("breakpoint {i} is not finite")));
            }
            if bp.utility < 0.0 {
                return Err(self.invalid(format!("breakpoint {i} has negative utility {}", bp.utility)));
            }
        }
        for (i, w) in bps.windows(2).enumerate() {
            if self.direction.orient(w[1].value) <= self.direction.orient(w[0].value) {
                return Err(self.invalid(format!(
                    "breakpoints {i} and {} are not strictly ordered by preference",
                    i + 1
                )));
            }
            if w[1].utility <= w[0].utility {
                return Err(self.invalid(format!(
                    "utilities must increase strictly along preference order (breakpoint {})",
                    i + 1
                )));
            }
        }
        if bps[self.bad_index].utility != 0.0 {
            return Err(self.invalid("Bad anchor must have utility exactly 0"));
        }
        if bps[self.good_index].utility != 1.0 {
            return Err(self.invalid("Good anchor must have utility exactly 1"));
        }
        Ok(())
    }

    pub fn bad_value(&self) -> f64 {
        self.breakpoints[self.bad_index].value
    }

    pub fn good_value(&self) -> f64 {
        self.breakpoints[self.good_index].value
    }

    /// Utility of a raw metric value.
    pub fn apply(&self, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(McdaError::NonFiniteValue { metric: self.metric_id.clone(), value });
        }
        Ok(self.apply_unchecked(value))
    }

    pub(crate) fn apply_unchecked(&self, value: f64) -> f64 {
        let dir = self.direction;
        let bps = &self.breakpoints;
        let s = dir.orient(value);
        let first = dir.orient(bps[0].value);
        if s <= first {
            return bps[0].utility;
        }
        let last = bps.len() - 1;
        let s_last = dir.orient(bps[last].value);
        if s >= s_last {
            let (a, b) = (&bps[last - 1], &bps[last]);
            let slope = (b.utility - a.utility) / (s_last - dir.orient(a.value));
            return b.utility + slope * (s - s_last);
        }
        // first index whose oriented value exceeds s; s lies in [i-1, i)
        let i = bps.partition_point(|bp| dir.orient(bp.value) <= s);
        let (a, b) = (&bps[i - 1], &bps[i]);
        let (sa, sb) = (dir.orient(a.value), dir.orient(b.value));
        a.utility + (s - sa) / (sb - sa) * (b.utility - a.utility)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn maxcut() -> UtilityFunction {
        UtilityFunction::from_pairs(
            "maxcut",
            Direction::HigherIsBetter,
            &[(0.0, 0.0), (17.0, 2.0 / 15.0), (70.0, 6.0 / 15.0), (140.0, 10.0 / 15.0), (1000.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn interpolates_between_breakpoints() {
        let f = maxcut();
        assert_abs_diff_eq!(f.apply(70.0).unwrap(), 0.4, epsilon = 1e-12);
        assert_eq!(f.apply(0.0).unwrap(), 0.0);
        // midway between (70, 0.4) and (140, 0.6667)
        assert_abs_diff_eq!(f.apply(105.0).unwrap(), 8.0 / 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.apply(105.0).unwrap(), 0.5333, epsilon = 1e-4);
    }

    #[test]
    fn clamps_below_bad_and_extrapolates_above_best() {
        let f = maxcut();
        assert_eq!(f.apply(-5.0).unwrap(), 0.0);
        let slope = (1.0 - 10.0 / 15.0) / 860.0;
        assert_abs_diff_eq!(f.apply(2000.0).unwrap(), 1.0 + slope * 1000.0, epsilon = 1e-12);
        assert!(f.apply(2000.0).unwrap() > 1.0);
    }

    #[test]
    fn exact_at_every_breakpoint() {
        let f = maxcut();
        for bp in &f.breakpoints {
            assert_eq!(f.apply(bp.value).unwrap(), bp.utility);
        }
    }

    #[test]
    fn lower_is_better_mirror() {
        let f = UtilityFunction::from_pairs(
            "latency_ms",
            Direction::LowerIsBetter,
            &[(100.0, 0.0), (10.0, 0.5), (1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(f.apply(1.0).unwrap(), 1.0);
        assert_eq!(f.apply(500.0).unwrap(), 0.0);
        assert_abs_diff_eq!(f.apply(55.0).unwrap(), 0.25, epsilon = 1e-12);
        assert!(f.apply(0.5).unwrap() > 1.0);
    }

    #[test]
    fn rejects_malformed_functions() {
        let non_monotone = UtilityFunction::new(
            "m",
            Direction::HigherIsBetter,
            vec![Breakpoint::new(0.0, 0.0), Breakpoint::new(5.0, 1.0), Breakpoint::new(10.0, 0.5)],
            0,
            1,
        );
        assert!(matches!(non_monotone, Err(McdaError::InvalidUtility { .. })));
        let wrong_order = UtilityFunction::new(
            "m",
            Direction::LowerIsBetter,
            vec![Breakpoint::new(0.0, 0.0), Breakpoint::new(5.0, 1.0)],
            0,
            1,
        );
        assert!(wrong_order.is_err());
        let bad_anchor = UtilityFunction::new(
            "m",
            Direction::HigherIsBetter,
            vec![Breakpoint::new(0.0, 0.1), Breakpoint::new(5.0, 1.0)],
            0,
            1,
        );
        assert!(bad_anchor.is_err());
    }

    #[test]
    fn rejects_non_finite_input() {
        assert!(matches!(maxcut().apply(f64::NAN), Err(McdaError::NonFiniteValue { .. })));
        assert!(maxcut().apply(f64::INFINITY).is_err());
    }
}
