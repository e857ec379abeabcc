//! End-to-end pipelines: node classification, node-signal imputation on
//! coauthorship complexes, and graph classification, plus splits and metrics.

mod config;
mod graphclass;
mod impute;
mod metrics;
mod node;
mod splits;

pub use config::{Readout, TaskConfig, TaskKind};
pub use graphclass::{
    degree_one_hot, graph_classify, graph_log_probs, load_graph_set, parse_graph_set, predict_graph,
    write_graph_set, LabeledGraph, FOLDS,
};
pub use impute::{impute_run, impute_signals, synthetic_coauthorship, CoauthorshipComplex, MIN_COLLABORATIONS};
pub use metrics::{accuracy, compute_homophily, kendall_tau, mean_ci95, MetricsReport, RunMetrics};
pub use node::{argmax_rows, prepare_node_features, train_node_classification, train_node_run, train_node_runs, NodeRun};
pub use splits::{kfold, make_splits, part_sizes, SplitSpec, DEFAULT_RATIOS};
