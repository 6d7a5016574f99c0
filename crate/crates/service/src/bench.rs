//! Local benchmark runs turned into records.

use std::collections::BTreeMap;
use std::time::Instant;

use chrono::{DateTime, Utc};
use qbench_core::opt::{
    beta_score, decode_factors, decode_matching, gen_instance, linear_residual, matching_oracle, qscore, seed_for,
    solve, solve_linear_system, Family, Instance, InstanceSpec, MatchingSpec, QScoreConfig, QScoreReport, SolverSpec,
    MAX_EXHAUSTIVE_VARS,
};
use qbench_core::par::Execution;
use qbench_core::sim::{SimDocument, SimScore};
use serde::{Deserialize, Serialize};

use crate::records::{BenchmarkRecord, Provenance, ENERGY, WALL_CLOCK};
use crate::{Result, ServiceError};

/// Family name used for spin-chain simulation records.
pub const SPIN_CHAIN: &str = "spin_chain";

/// Parses `a..b` (inclusive), `a,b,c` or a single size.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || ServiceError::Invalid(format!("sizes `{s}` must look like `8..12`, `8,10,12` or `10`"));
    let sizes: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub family: Family,
    pub solver: SolverSpec,
    /// Meaning depends on the family: vertices for MaxCut, vertices per side
    /// for matching, variables for HOBO, the modulus for factorization and
    /// the dimension for linear systems.
    pub sizes: Vec<usize>,
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Defaults to the solver name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative_id: Option<String>,
    #[serde(default)]
    pub execution: Execution,
}

fn spec_for(family: Family, size: usize) -> Option<InstanceSpec> {
    Some(match family {
        Family::MaxCut => InstanceSpec::MaxCut { n: size },
        Family::Matching => InstanceSpec::Matching(MatchingSpec::RandomBipartite { left: size, right: size, edge_probability: 0.5 }),
        Family::Hobo => InstanceSpec::Hobo { num_vars: size, degree: 3, num_terms: 2 * size },
        // Even and tiny moduli are not factorization instances; a size range
        // simply steps over them.
        Family::Factorization if size % 2 == 1 && size >= 9 => InstanceSpec::Factorization { n: size as u64 },
        Family::Factorization => return None,
        Family::LinearSystem => InstanceSpec::LinearSystem { dim: size },
        Family::Custom => return None,
    })
}

fn record(alt: &str, family: &str, instance: String, seed: Option<u64>, metrics: BTreeMap<String, f64>, now: DateTime<Utc>) -> BenchmarkRecord {
    BenchmarkRecord { alternative_id: alt.into(), family: family.into(), instance, seed, metrics, timestamp: now, provenance: Provenance::Local }
}

/// One record per (size, seed). Instance seeds derive from the base seed,
/// the size and the seed index, so reruns reproduce the same instances.
pub fn run_bench(cfg: &BenchConfig, now: DateTime<Utc>) -> Result<Vec<BenchmarkRecord>> {
    if cfg.family == Family::Custom {
        return Err(ServiceError::Invalid("the custom family has no generator".into()));
    }
    if cfg.seeds == 0 {
        return Err(ServiceError::Invalid("at least one seed is required".into()));
    }
    let alt = cfg.alternative_id.clone().unwrap_or_else(|| match cfg.family {
        Family::LinearSystem => "lu".to_string(),
        _ => cfg.solver.name(),
    });
    let family = cfg.family.to_string();
    let jobs: Vec<(usize, InstanceSpec, u64)> = cfg
        .sizes
        .iter()
        .filter_map(|&n| spec_for(cfg.family, n).map(|s| (n, s)))
        .flat_map(|(n, s)| (0..cfg.seeds as u64).map(move |k| (n, s.clone(), seed_for(seed_for(cfg.base_seed, n as u64), k))))
        .collect();
    if jobs.is_empty() {
        return Err(ServiceError::Invalid(format!("no valid {family} sizes in {:?}", cfg.sizes)));
    }
    let results = cfg.execution.try_map(jobs, |(n, spec, seed)| {
        let metrics = run_one(&spec, &cfg.solver, seed, cfg.execution)?;
        Ok::<_, ServiceError>(record(&alt, &family, format!("{family}-n{n}"), Some(seed), metrics, now))
    })?;
    Ok(results)
}

fn run_one(spec: &InstanceSpec, solver: &SolverSpec, seed: u64, exec: Execution) -> Result<BTreeMap<String, f64>> {
    let mut m = BTreeMap::new();
    let inst = gen_instance(spec, seed)?;
    let (problem, graph) = match &inst {
        Instance::Linear { system, .. } => {
            let start = Instant::now();
            let x = solve_linear_system(system)?;
            m.insert(WALL_CLOCK.into(), start.elapsed().as_secs_f64());
            m.insert("residual".into(), linear_residual(&system.a, &system.b, &x)?);
            m.insert("dim".into(), system.dim() as f64);
            return Ok(m);
        }
        Instance::PseudoBoolean { problem, graph } => (problem, graph.as_ref()),
    };
    let sol = solve(problem, solver, seed_for(seed, u64::MAX), exec)?;
    m.insert("objective".into(), sol.objective);
    m.insert("num_vars".into(), problem.num_vars() as f64);
    m.insert(WALL_CLOCK.into(), sol.wall_clock_seconds);
    if let Some(e) = sol.energy_joules {
        m.insert(ENERGY.into(), e);
    }
    match spec {
        InstanceSpec::MaxCut { n } => {
            let cfg = QScoreConfig::new(vec![*n], 1);
            m.insert("num_edges".into(), graph.map_or(0, |g| g.num_edges()) as f64);
            m.insert("beta".into(), beta_score(*n, sol.objective, &cfg));
        }
        InstanceSpec::Matching(_) => {
            let g = graph.expect("matching instances carry their graph");
            let optimum = matching_oracle(g)? as f64;
            let found = decode_matching(g, &sol.assignment)?;
            m.insert("optimal_size".into(), optimum);
            m.insert("valid".into(), found.is_some() as u8 as f64);
            let size = found.map_or(0, |f| f.len()) as f64;
            m.insert("matching_size".into(), size);
            m.insert("ratio".into(), if optimum > 0.0 { size / optimum } else { 1.0 });
        }
        InstanceSpec::Factorization { .. } => {
            let d = decode_factors(problem, &sol.assignment)?;
            m.insert("cost".into(), d.cost as f64);
            m.insert("success".into(), (d.cost == 0) as u8 as f64);
        }
        InstanceSpec::Hobo { .. } if problem.num_vars() <= MAX_EXHAUSTIVE_VARS.min(20) => {
            let best = solve(problem, &SolverSpec::Exhaustive, 0, exec)?.objective;
            m.insert("optimum".into(), best);
            m.insert("gap".into(), (sol.objective - best).abs());
        }
        _ => {}
    }
    Ok(m)
}

/// Records for a Q-score sweep: one per size plus a summary under instance
/// `qscore` whose `qscore` metric is the score itself.
pub fn qscore_records(alt: &str, report: &QScoreReport, cfg: &QScoreConfig, now: DateTime<Utc>) -> Vec<BenchmarkRecord> {
    let family = Family::MaxCut.to_string();
    let mut out: Vec<BenchmarkRecord> = report
        .sizes
        .iter()
        .map(|s| {
            let mut m = BTreeMap::new();
            m.insert("beta".into(), s.beta);
            m.insert("mean_best_cut".into(), s.mean_best_cut);
            m.insert("passed".into(), s.passed as u8 as f64);
            m.insert("instances".into(), s.runs.len() as f64);
            m.insert(WALL_CLOCK.into(), s.runs.iter().map(|r| r.wall_clock_seconds).sum());
            if s.runs.iter().all(|r| r.energy_joules.is_some()) && !s.runs.is_empty() {
                m.insert(ENERGY.into(), s.runs.iter().filter_map(|r| r.energy_joules).sum());
            }
            record(alt, &family, format!("qscore-n{}", s.n), Some(cfg.seed), m, now)
        })
        .collect();
    let mut m = BTreeMap::new();
    m.insert("qscore".into(), report.qscore as f64);
    out.push(record(alt, &family, "qscore".into(), Some(cfg.seed), m, now));
    out
}

pub fn run_qscore(alt: Option<&str>, solver: &SolverSpec, cfg: &QScoreConfig, now: DateTime<Utc>) -> Result<(QScoreReport, Vec<BenchmarkRecord>)> {
    let report = qscore(solver, cfg)?;
    let records = qscore_records(alt.unwrap_or(&report.solver), &report, cfg, now);
    Ok((report, records))
}

/// Record for a scored simulation measurement.
pub fn sim_record(alt: &str, doc: &SimDocument, score: &SimScore, now: DateTime<Utc>) -> BenchmarkRecord {
    let model = serde_json::to_value(&doc.model).ok().and_then(|v| v["model"].as_str().map(str::to_owned)).unwrap_or_default();
    let mut m = BTreeMap::new();
    m.insert("g".into(), score.g);
    m.insert("observable_count".into(), score.observable_count as f64);
    if let Some(f) = score.fidelity {
        m.insert("fidelity".into(), f);
    }
    let instance = format!("{model}-n{}-{}-t{}", doc.model.num_qubits(), doc.initial_state, doc.t);
    record(alt, SPIN_CHAIN, instance, None, m, now)
}
