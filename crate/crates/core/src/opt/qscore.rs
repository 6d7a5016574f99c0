use serde::{Deserialize, Serialize};

use super::generate::{gen_instance, seed_for, InstanceSpec};
use super::solve::{solve, SolverSpec};
use super::{OptError, Result};
use crate::par::Execution;

/// Expected cut of a uniformly random assignment, the zero point of β.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomBaseline {
    /// `n^2 / 8`, the large-n form used by published Q-score values.
    Asymptotic,
    /// `n (n - 1) / 8`: half the expected edge count of `G(n, 1/2)`, the
    /// exact mean of a random cut at every n.
    #[default]
    ExactExpectation,
}

impl RandomBaseline {
    pub fn mean_random_cut(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            RandomBaseline::Asymptotic => n * n / 8.0,
            RandomBaseline::ExactExpectation => n * (n - 1.0) / 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScoreConfig {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub baseline: RandomBaseline,
    /// Coefficient of `n^{3/2}` in the best-cut estimate.
    #[serde(default = "default_coefficient")]
    pub best_cut_coefficient: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub execution: Execution,
}

fn default_threshold() -> f64 {
    0.2
}

fn default_coefficient() -> f64 {
    0.178
}

impl QScoreConfig {
    pub fn new(sizes: Vec<usize>, instances_per_size: usize) -> Self {
        Self {
            sizes,
            instances_per_size,
            threshold: default_threshold(),
            baseline: RandomBaseline::default(),
            best_cut_coefficient: default_coefficient(),
            seed: 0,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(OptError::InvalidConfig(m));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        if self.sizes.is_empty() {
            return bad("no sizes to test".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sizes must be strictly increasing".into());
        }
        if self.sizes[0] < 5 {
            return bad(format!("size {} below the minimum of 5", self.sizes[0]));
        }
        if self.instances_per_size == 0 {
            return bad("instances per size must be positive".into());
        }
        if !(self.best_cut_coefficient.is_finite() && self.best_cut_coefficient > 0.0) {
            return bad(format!("best-cut coefficient {} must be positive", self.best_cut_coefficient));
        }
        Ok(())
    }
}

/// `(mean_best_cut - baseline(n)) / (c n^{3/2})`.
pub fn beta_score(n: usize, mean_best_cut: f64, cfg: &QScoreConfig) -> f64 {
    (mean_best_cut - cfg.baseline.mean_random_cut(n)) / (cfg.best_cut_coefficient * (n as f64).powf(1.5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRun {
    pub seed: u64,
    pub num_edges: usize,
    pub best_cut: f64,
    pub wall_clock_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_joules: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub n: usize,
    pub mean_best_cut: f64,
    pub beta: f64,
    pub passed: bool,
    pub runs: Vec<InstanceRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScoreReport {
    pub solver: String,
    /// Largest tested n with β above threshold, 0 if none passed.
    pub qscore: usize,
    pub threshold: f64,
    pub baseline: RandomBaseline,
    pub sizes: Vec<SizeResult>,
}

fn run_size(solver: &SolverSpec, cfg: &QScoreConfig, n: usize) -> Result<SizeResult> {
    let seeds: Vec<u64> = (0..cfg.instances_per_size).map(|i| seed_for(seed_for(cfg.seed, n as u64), i as u64)).collect();
    let runs = cfg.execution.try_map(seeds, |seed| {
        let inst = gen_instance(&InstanceSpec::MaxCut { n }, seed)?;
        let p = inst.problem().expect("maxcut is pseudo-Boolean");
        let sol = solve(p, solver, seed_for(seed, u64::MAX), cfg.execution)?;
        Ok::<_, OptError>(InstanceRun {
            seed,
            num_edges: inst.graph().map_or(0, |g| g.num_edges()),
            best_cut: sol.objective,
            wall_clock_seconds: sol.wall_clock_seconds,
            energy_joules: sol.energy_joules,
        })
    })?;
    let mean_best_cut = runs.iter().map(|r| r.best_cut).sum::<f64>() / runs.len() as f64;
    let beta = beta_score(n, mean_best_cut, cfg);
    Ok(SizeResult { n, mean_best_cut, beta, passed: beta > cfg.threshold, runs })
}

/// Runs the solver on `G(n, 1/2)` MaxCut instances at every configured size.
/// A failure at some size aborts the sweep; sizes finished so far travel
/// with the error.
pub fn qscore(solver: &SolverSpec, cfg: &QScoreConfig) -> Result<QScoreReport> {
    cfg.validate()?;
    let mut report = QScoreReport { solver: solver.name(), qscore: 0, threshold: cfg.threshold, baseline: cfg.baseline, sizes: Vec::new() };
    for &n in &cfg.sizes {
        match run_size(solver, cfg, n) {
            Ok(r) => {
                if r.passed {
                    report.qscore = n;
                }
                report.sizes.push(r);
            }
            Err(e) => return Err(OptError::QScoreAborted { n, reason: e.to_string(), partial: Box::new(report) }),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::solve::AdapterConfig;
    use approx::assert_abs_diff_eq;

    fn asymptotic() -> QScoreConfig {
        QScoreConfig { baseline: RandomBaseline::Asymptotic, ..QScoreConfig::new(vec![10], 1) }
    }

    #[test]
    fn beta_fixed_points() {
        let cfg = asymptotic();
        for n in [5, 10, 40] {
            let base = (n * n) as f64 / 8.0;
            assert_abs_diff_eq!(beta_score(n, base, &cfg), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(beta_score(n, base + 0.178 * (n as f64).powf(1.5), &cfg), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn beta_hand_value() {
        // (15.4 - 12.5) / (0.178 * 10^{3/2})
        assert_abs_diff_eq!(beta_score(10, 15.4, &asymptotic()), 0.5152, epsilon = 1e-4);
        let exact = QScoreConfig::new(vec![10], 1);
        assert_abs_diff_eq!(beta_score(10, 15.4, &exact), (15.4 - 11.25) / (0.178 * 1000f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn validation() {
        let ok = QScoreConfig::new(vec![8, 10], 2);
        assert!(ok.validate().is_ok());
        assert!(QScoreConfig { threshold: 1.0, ..ok.clone() }.validate().is_err());
        assert!(QScoreConfig { sizes: vec![10, 8], ..ok.clone() }.validate().is_err());
        assert!(QScoreConfig { sizes: vec![4, 8], ..ok.clone() }.validate().is_err());
        assert!(QScoreConfig { instances_per_size: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn exhaustive_passes_small_sizes() {
        let cfg = QScoreConfig::new(vec![6, 8], 10);
        let r = qscore(&SolverSpec::Exhaustive, &cfg).unwrap();
        assert_eq!(r.qscore, 8);
        assert_eq!(r.sizes.len(), 2);
        assert!(r.sizes.iter().all(|s| s.runs.len() == 10 && s.beta > 0.2));
    }

    #[test]
    fn failure_keeps_partial_results() {
        let cfg = QScoreConfig::new(vec![6, 25], 2);
        match qscore(&SolverSpec::Exhaustive, &cfg) {
            Err(OptError::QScoreAborted { n, partial, .. }) => {
                assert_eq!(n, 25);
                assert_eq!(partial.sizes.len(), 1);
                assert_eq!(partial.sizes[0].n, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        let missing = SolverSpec::External(AdapterConfig { command: "/nonexistent/solver".into(), args: vec![], timeout_seconds: 1.0 });
        assert!(matches!(qscore(&missing, &cfg), Err(OptError::QScoreAborted { n: 6, .. })));
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = QScoreConfig { seed: 5, ..QScoreConfig::new(vec![8], 4) };
        let a = qscore(&SolverSpec::Random, &cfg).unwrap();
        let b = qscore(&SolverSpec::Random, &QScoreConfig { execution: Execution::Sequential, ..cfg }).unwrap();
        let cuts = |r: &QScoreReport| r.sizes[0].runs.iter().map(|x| x.best_cut).collect::<Vec<_>>();
        assert_eq!(cuts(&a), cuts(&b));
    }
}
