use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fp_core::complex::{clique_lift, load_graph, write_edges, DEFAULT_MAX_ORDER};
use fp_core::fp::spectra_report;
use fp_core::higcn::{gamma_init, load_checkpoint, save_checkpoint, strength};
use fp_core::iso::{distinguish, Method};
use fp_core::nullmodel::rewire_until;
use fp_core::tasks::{
    graph_classify, impute_signals, load_graph_set, synthetic_coauthorship, train_node_runs, CoauthorshipComplex,
    TaskConfig, TaskKind,
};
use fp_core::{par, Error, Result};

/// Flower-petals simplicial operators, HiGCN training and WL-family tests.
#[derive(Debug, Parser)]
#[command(name = "fp", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clique-lift a graph and print simplex counts per order
    Lift(LiftArgs),
    /// Eigenvalue extrema of every FP adjacency and Laplacian
    Spectra(LiftArgs),
    /// Node classification with HiGCN
    Train(TrainArgs),
    /// Node-signal imputation on a coauthorship complex
    Impute(ImputeArgs),
    /// Graph classification with 10-fold cross-validation
    Graphclass(GraphclassArgs),
    /// Compare two graphs with WL, HWL or SHWL refinement
    Shwl(ShwlArgs),
    /// Degree-preserving rewiring towards a relative triangle density
    Rewire(RewireArgs),
    /// Higher-order strength from a checkpoint, or of a fresh initialization
    Strength(StrengthArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LiftArgs {
    /// Edge list (two node ids per line, optional `#n=` header)
    #[arg(long)]
    edges: PathBuf,
    /// Highest simplex order
    #[arg(long = "max-order", short = 'p', default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RunOptions {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use this single seed instead of the configured list
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent runs (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Row-aligned feature CSV
    #[arg(long)]
    features: PathBuf,
    /// One class id per line
    #[arg(long)]
    labels: PathBuf,
    /// Save the first run's best parameters
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    run: RunOptions,
}

#[derive(Debug, Args)]
struct ImputeArgs {
    /// Coauthorship file: `order<TAB>n1,n2,...<TAB>signal` per line
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    complex: Option<PathBuf>,
    /// Generate a synthetic coauthorship complex with this many authors
    #[arg(long)]
    synthetic: Option<usize>,
    /// Seed of the synthetic complex
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// Overrides `known_fraction` from the config
    #[arg(long)]
    known_fraction: Option<f64>,
    #[command(flatten)]
    run: RunOptions,
}

#[derive(Debug, Args)]
struct GraphclassArgs {
    /// Graph set: `#graph n=<nodes> label=<class>` blocks of edge lines
    #[arg(long)]
    graphs: PathBuf,
    #[command(flatten)]
    run: RunOptions,
}

#[derive(Debug, Args)]
struct ShwlArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// wl, hwl or shwl
    #[arg(long, default_value = "shwl")]
    method: Method,
    #[arg(long = "max-order", short = 'p', default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RewireArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Target relative triangle density `n_2'/n_2 - 1`
    #[arg(long, allow_negative_numbers = true)]
    target: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rewired edge list
    #[arg(long)]
    out: PathBuf,
    /// JSON log path (stdout when absent)
    #[arg(long)]
    log: Option<PathBuf>,
    /// Allow the triangle-breaking inverse move for negative targets
    #[arg(long)]
    allow_remove: bool,
}

#[derive(Debug, Args)]
struct StrengthArgs {
    /// Checkpoint written by `train --checkpoint`
    #[arg(long, conflicts_with_all = ["alpha", "orders", "hops"])]
    checkpoint: Option<PathBuf>,
    /// Initialization constant for a fresh model
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long = "orders", short = 'P', default_value_t = 2)]
    orders: usize,
    #[arg(long = "hops", short = 'K', default_value_t = 10)]
    hops: usize,
    #[command(flatten)]
    output: Output,
}

/// 1 usage or configuration, 2 input data, 3 numerical or saturation.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        Error::NonFinite(_)
        | Error::Saturated { .. }
        | Error::HashCollision
        | Error::ConstantInput
        | Error::UndefinedDensity(_)
        | Error::OddSteps(_)
        | Error::MassOnIsolated { .. }
        | Error::EmptyMask
        | Error::NotSymmetric(_) => 3,
        _ => 2,
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io { path: p.to_path_buf(), source: e }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn load_config(opts: &RunOptions, task: TaskKind) -> Result<TaskConfig> {
    let mut cfg = match &opts.config {
        Some(p) => TaskConfig::load(p)?,
        None => TaskConfig::new(task),
    };
    if cfg.task != task {
        return Err(Error::Config(format!("`task` is {:?}, this subcommand runs {task:?}", cfg.task)));
    }
    if let Some(seed) = opts.seed {
        cfg.seeds = vec![seed];
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Lift(a) => {
            let (g, _) = load_graph(&a.edges, None, None)?;
            let k = clique_lift(&g, a.max_order)?;
            let mut obj = serde_json::Map::new();
            obj.insert("n".into(), json!(g.node_count()));
            for p in 1..=a.max_order {
                obj.insert(format!("n_{p}"), json!(k.count(p)));
            }
            emit(&Value::Object(obj), a.output.out.as_deref())
        }
        Command::Spectra(a) => {
            let (g, _) = load_graph(&a.edges, None, None)?;
            let k = clique_lift(&g, a.max_order)?;
            emit(&to_value(spectra_report(&g, &k, a.max_order)?), a.output.out.as_deref())
        }
        Command::Train(a) => {
            let cfg = load_config(&a.run, TaskKind::NodeClassification)?;
            let (g, _) = load_graph(&a.edges, Some(&a.features), Some(&a.labels))?;
            let (report, runs) = par::with_jobs(a.run.jobs, || train_node_runs(&g, &cfg))?;
            if let Some(path) = &a.checkpoint {
                save_checkpoint(&runs[0].params, path)?;
            }
            emit(&json!({ "config": cfg, "report": report }), a.run.output.out.as_deref())
        }
        Command::Impute(a) => {
            let mut cfg = load_config(&a.run, TaskKind::Imputation)?;
            if let Some(f) = a.known_fraction {
                cfg.known_fraction = f;
                cfg.validate()?;
            }
            let cc = match (&a.complex, a.synthetic) {
                (Some(p), _) => CoauthorshipComplex::load(p)?,
                (None, Some(n)) => synthetic_coauthorship(n, a.data_seed)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            let report = par::with_jobs(a.run.jobs, || impute_signals(&cc, cfg.known_fraction, &cfg))?;
            let data = json!({ "nodes": cc.node_count(), "simplices": cc.complex.counts(), "data_seed": a.data_seed });
            emit(&json!({ "config": cfg, "data": data, "report": report }), a.run.output.out.as_deref())
        }
        Command::Graphclass(a) => {
            let cfg = load_config(&a.run, TaskKind::GraphClassification)?;
            let graphs = load_graph_set(&a.graphs)?;
            let report = par::with_jobs(a.run.jobs, || graph_classify(&graphs, &cfg))?;
            emit(&json!({ "config": cfg, "report": report }), a.run.output.out.as_deref())
        }
        Command::Shwl(a) => {
            let (ga, _) = load_graph(&a.a, None, None)?;
            let (gb, _) = load_graph(&a.b, None, None)?;
            if a.method != Method::Wl && a.max_order == 0 {
                return Err(Error::Config("`--max-order` must be >= 1 for hwl and shwl".into()));
            }
            emit(&to_value(distinguish(&ga, &gb, a.method, a.max_order)?), a.output.out.as_deref())
        }
        Command::Rewire(a) => {
            if a.target < 0.0 && !a.allow_remove {
                return Err(Error::Config("negative `--target` needs `--allow-remove`".into()));
            }
            let (g, _) = load_graph(&a.edges, None, None)?;
            let out = rewire_until(&g, a.target, a.seed, a.allow_remove)?;
            write_edges(&out.graph, &a.out)?;
            let log = json!({
                "seed": a.seed,
                "target_rho2": a.target,
                "achieved_rho2": out.achieved_rho2,
                "original_triangles": out.original_triangles,
                "triangles": out.triangles,
                "accepted": out.log.accepted.len(),
                "attempts": out.log.attempts,
                "saturated": out.saturated,
                "moves": out.log.accepted,
            });
            emit(&log, a.log.as_deref())?;
            if out.saturated {
                return Err(Error::Saturated { attempts: out.log.attempts, achieved: Some(out.achieved_rho2) });
            }
            Ok(())
        }
        Command::Strength(a) => {
            let value = match &a.checkpoint {
                Some(p) => {
                    let params = load_checkpoint(p)?;
                    json!({ "source": "checkpoint", "seed": params.seed, "gamma": params.gamma, "strength": strength(&params) })
                }
                None => {
                    if !(a.alpha > 0.0 && a.alpha <= 1.0) || a.orders == 0 {
                        return Err(Error::Config("`--alpha` must be in (0, 1] and `--orders` >= 1".into()));
                    }
                    let row = gamma_init(a.alpha, a.hops);
                    let s: f64 = row.iter().map(|g| g.abs()).sum();
                    json!({ "source": "init", "alpha": a.alpha, "gamma": vec![row; a.orders], "strength": vec![s; a.orders] })
                }
            };
            emit(&value, a.output.out.as_deref())
        }
    }
}
