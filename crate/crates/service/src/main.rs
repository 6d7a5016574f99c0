use std::fs;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::Utc;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qbench_core::elicitation::{check_consistency, Gap, Session, UtilitySession};
use qbench_core::explanation::ReferenceKind;
use qbench_core::opt::{AdapterConfig, Family, QScoreConfig, RandomBaseline, SolverSpec};
use qbench_core::par::Execution;
use qbench_core::sim::{ideal_document, score_measurement, EvolutionMethod, ModelSpec, ObservableSet, SimDocument};
use qbench_service::bench::{parse_sizes, run_bench, run_qscore, sim_record, BenchConfig};
use qbench_service::records::{BenchmarkRecord, ResultsDocument};
use qbench_service::report::{explain_in_store, render_markdown, score_store};
use qbench_service::sessions::apply_session;
use qbench_service::store::{parse_model, Store};
use qbench_service::{to_document, STORE_ENV};

#[derive(Parser)]
#[command(name = "qbench", version, about = "Application benchmarks and multi-criteria scoring of compute backends")]
struct Cli {
    /// Store directory holding records, models and sessions.
    #[arg(long, global = true, env = STORE_ENV, default_value = "qbench-store")]
    store: PathBuf,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, show or import criteria-tree models.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Derive utilities and capacities from elicitation sessions.
    #[command(subcommand)]
    Elicit(ElicitCmd),
    /// Run optimisation benchmarks and the Q-score sweep.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Append a results document to the store.
    Ingest { file: PathBuf },
    /// Print the ranking of every alternative under a stored model.
    Score { #[arg(long)] model: String },
    /// Contribution of every node to one alternative's score gap.
    Explain {
        #[arg(long)]
        model: String,
        #[arg(long)]
        alternative: String,
        #[arg(long, value_enum, default_value = "worst")]
        reference: Reference,
    },
    /// Full report as markdown or as the JSON document the API returns.
    Report {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        #[arg(long, value_enum)]
        explain: Option<Reference>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Reference spin-chain simulation and scoring of device results.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Check a model file without storing it.
    Validate { file: PathBuf },
    /// Print a stored model.
    Show { name: String },
    /// Validate a model file and store it under a name.
    Import { name: String, file: PathBuf },
}

#[derive(Args)]
struct ElicitTarget {
    #[arg(long)]
    model: String,
    #[arg(long)]
    node: String,
    /// Session document; omit with --interactive.
    #[arg(long)]
    session: Option<PathBuf>,
    /// Print the resulting model without storing it.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum ElicitCmd {
    Utility {
        #[command(flatten)]
        target: ElicitTarget,
        /// Ask for the ranking and gap labels on the terminal.
        #[arg(long)]
        interactive: bool,
    },
    Capacity {
        #[command(flatten)]
        target: ElicitTarget,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "sa")]
    solver: SolverKind,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Adapter executable for the external solver.
    #[arg(long)]
    adapter: Option<String>,
    #[arg(long = "adapter-arg")]
    adapter_args: Vec<String>,
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Generate instances, solve them and record the metrics.
    Run {
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        solver: SolverArgs,
        /// `a..b`, `a,b,c` or a single size.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        alternative: Option<String>,
        /// Write a results document here instead of appending to the store.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Q-score sweep on random MaxCut instances.
    Qscore {
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "10,20,30,40")]
        sizes: String,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        baseline: Baseline,
        #[arg(long)]
        alternative: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Exact expectation values for a model, initial state and time.
    Ideal {
        /// Model document, e.g. {"model":"xxz","n":6,"delta":0.5,"boundary":"open"}.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        initial: String,
        #[arg(long)]
        t: f64,
        /// Comma-separated Pauli labels; defaults to all weight-one and
        /// weight-two strings.
        #[arg(long)]
        observables: Option<String>,
        #[arg(long)]
        trotter_steps: Option<usize>,
    },
    /// Score a measurement document against exact evolution.
    Score {
        file: PathBuf,
        /// Store the score as a record of this alternative.
        #[arg(long)]
        alternative: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Random,
    Exhaustive,
    Sa,
    External,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reference {
    Worst,
    Ideal,
}

impl From<Reference> for ReferenceKind {
    fn from(r: Reference) -> Self {
        match r {
            Reference::Worst => ReferenceKind::Worst,
            Reference::Ideal => ReferenceKind::Ideal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Exact,
    Asymptotic,
}

fn solver_spec(a: &SolverArgs) -> Result<SolverSpec> {
    Ok(match a.solver {
        SolverKind::Random => SolverSpec::Random,
        SolverKind::Exhaustive => SolverSpec::Exhaustive,
        SolverKind::Sa => SolverSpec::annealing(a.sweeps, a.restarts),
        SolverKind::External => {
            let command = a.adapter.clone().context("--adapter is required for the external solver")?;
            SolverSpec::External(AdapterConfig { command, args: a.adapter_args.clone(), timeout_seconds: a.timeout })
        }
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn store_records(cli: &Cli, records: Vec<BenchmarkRecord>, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => {
            if p.is_dir() || p.extension().is_none() {
                fs::create_dir_all(p)?;
                let file = p.join(format!("results-{}.json", Utc::now().format("%Y%m%dT%H%M%S")));
                emit(&to_document(&ResultsDocument::new(records)), Some(&file))?;
                eprintln!("wrote {}", file.display());
            } else {
                emit(&to_document(&ResultsDocument::new(records)), Some(p))?;
            }
        }
        None => {
            let report = Store::open(&cli.store)?.add_records(records)?;
            eprintln!("stored {} records, {} duplicates", report.accepted.len(), report.duplicates.len());
        }
    }
    Ok(())
}

fn prompt(lines: &mut impl Iterator<Item = io::Result<String>>, question: &str) -> Result<String> {
    eprint!("{question} ");
    io::stderr().flush()?;
    Ok(lines.next().context("input ended")??.trim().to_string())
}

/// Collects a utility session on the terminal: the ranked values, the Good
/// value and one intensity label per consecutive pair.
fn interactive_utility(metric: &str) -> Result<Session> {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    eprintln!("Eliciting `{metric}`. Labels: VeryWeak(1) Weak(2) Moderate(3) Strong(4) VeryStrong(5) Extreme(6).");
    loop {
        let raw = prompt(&mut lines, "Values from least to most preferred, first one is Bad (comma separated):")?;
        let elements: Vec<f64> = match raw.split(',').map(|x| x.trim().parse()).collect() {
            Ok(v) => v,
            Err(e) => {
                eprintln!("  {e}");
                continue;
            }
        };
        let good: f64 = match prompt(&mut lines, "Good value:")?.parse() {
            Ok(v) => v,
            Err(e) => {
                eprintln!("  {e}");
                continue;
            }
        };
        let mut gaps = Vec::new();
        for w in elements.windows(2) {
            loop {
                match prompt(&mut lines, &format!("Gain in satisfaction from {} to {}:", w[0], w[1]))?.parse::<Gap>() {
                    Ok(g) => break gaps.push(g),
                    Err(e) => eprintln!("  {e}"),
                }
            }
        }
        let session = Session::Utility(UtilitySession::new(metric, elements, gaps, good));
        let violations = check_consistency(&session);
        if violations.is_empty() {
            return Ok(session);
        }
        for v in violations {
            eprintln!("  {}", v.message);
        }
        eprintln!("Please answer again.");
    }
}

fn elicit(cli: &Cli, target: &ElicitTarget, session: Session) -> Result<()> {
    let store = Store::open(&cli.store)?;
    let tree = apply_session(&store.load_model(&target.model)?, &target.node, &session)?;
    if !target.dry_run {
        store.save_model(&target.model, &tree)?;
        eprintln!("updated node `{}` of model `{}`", target.node, target.model);
    }
    print!("{}", to_document(tree.node(&target.node)?));
    Ok(())
}

fn load_session(target: &ElicitTarget) -> Result<Session> {
    let path = target.session.as_deref().context("--session is required")?;
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing session {}", path.display()))
}

fn exec(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Model(ModelCmd::Validate { file }) => {
            let tree = parse_model(&read(file)?)?;
            println!("ok: {} nodes, {} metrics", tree.nodes().len(), tree.metric_ids().len());
        }
        Command::Model(ModelCmd::Show { name }) => print!("{}", to_document(&Store::open(&cli.store)?.load_model(name)?)),
        Command::Model(ModelCmd::Import { name, file }) => {
            let tree = parse_model(&read(file)?)?;
            Store::open(&cli.store)?.save_model(name, &tree)?;
            eprintln!("stored model `{name}`");
        }
        Command::Elicit(ElicitCmd::Utility { target, interactive }) => {
            let session = if *interactive {
                let tree = Store::open(&cli.store)?.load_model(&target.model)?;
                let metric = tree.node(&target.node)?.utility().context("node is not a criterion")?.metric_id.clone();
                interactive_utility(&metric)?
            } else {
                load_session(target)?
            };
            elicit(cli, target, session)?;
        }
        Command::Elicit(ElicitCmd::Capacity { target }) => elicit(cli, target, load_session(target)?)?,
        Command::Bench(BenchCmd::Run { family, solver, sizes, seeds, base_seed, alternative, out }) => {
            let cfg = BenchConfig {
                family: *family,
                solver: solver_spec(solver)?,
                sizes: parse_sizes(sizes)?,
                seeds: *seeds,
                base_seed: *base_seed,
                alternative_id: alternative.clone(),
                execution: exec(cli),
            };
            store_records(cli, run_bench(&cfg, Utc::now())?, out.as_deref())?;
        }
        Command::Bench(BenchCmd::Qscore { solver, sizes, instances, seed, baseline, alternative, out }) => {
            let mut cfg = QScoreConfig::new(parse_sizes(sizes)?, *instances);
            cfg.seed = *seed;
            cfg.execution = exec(cli);
            cfg.baseline = match baseline {
                Baseline::Exact => RandomBaseline::ExactExpectation,
                Baseline::Asymptotic => RandomBaseline::Asymptotic,
            };
            let (report, records) = run_qscore(alternative.as_deref(), &solver_spec(solver)?, &cfg, Utc::now())?;
            for s in &report.sizes {
                eprintln!("n={:>4}  beta={:+.4}  {}", s.n, s.beta, if s.passed { "pass" } else { "fail" });
            }
            eprintln!("Q-score: {}", report.qscore);
            store_records(cli, records, out.as_deref())?;
        }
        Command::Ingest { file } => {
            let report = Store::open(&cli.store)?.ingest(&read(file)?)?;
            for d in &report.duplicates {
                eprintln!("duplicate: {d}");
            }
            println!("accepted {} records, rejected {} duplicates", report.accepted.len(), report.duplicates.len());
        }
        Command::Score { model } => {
            let report = score_store(&Store::open(&cli.store)?, model, None, exec(cli))?;
            for r in &report.rows {
                println!("{:>3}  {:<24} {:.6}", r.rank, r.alternative_id, r.root_score);
            }
            for e in &report.excluded {
                eprintln!("warning: {} excluded: {}", e.alternative_id, e.reason);
            }
        }
        Command::Explain { model, alternative, reference } => {
            print!("{}", to_document(&explain_in_store(&Store::open(&cli.store)?, model, alternative, (*reference).into())?));
        }
        Command::Report { model, format, explain, out } => {
            let store = Store::open(&cli.store)?;
            let report = score_store(&store, model, explain.map(Into::into), exec(cli))?;
            let text = match format {
                Format::Json => to_document(&report),
                Format::Md => render_markdown(&report, &store.load_model(model)?),
            };
            emit(&text, out.as_deref())?;
        }
        Command::Serve { addr } => {
            let store = Store::open(&cli.store)?;
            eprintln!("serving {} on http://{addr}", cli.store.display());
            tokio::runtime::Runtime::new()?.block_on(qbench_service::api::serve(store, *addr))?;
        }
        Command::Sim(SimCmd::Ideal { model, initial, t, observables, trotter_steps }) => {
            let spec: ModelSpec = serde_json::from_str(&read(model)?).context("parsing model spec")?;
            let n = spec.num_qubits();
            let obs = match observables {
                Some(list) => ObservableSet::from_labels(n, &list.split(',').map(str::trim).collect::<Vec<_>>())?,
                None => ObservableSet::up_to_weight_two(n)?,
            };
            let method = trotter_steps.map_or(EvolutionMethod::Exact, |steps| EvolutionMethod::Trotter { steps });
            print!("{}", to_document(&ideal_document(&spec, initial, *t, &obs, method)?));
        }
        Command::Sim(SimCmd::Score { file, alternative }) => {
            let doc: SimDocument = serde_json::from_str(&read(file)?).context("parsing measurement document")?;
            let score = score_measurement(&doc)?;
            print!("{}", to_document(&score));
            if let Some(alt) = alternative {
                store_records(cli, vec![sim_record(alt, &doc, &score, Utc::now())], None)?;
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
