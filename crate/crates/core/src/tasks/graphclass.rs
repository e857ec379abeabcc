use std::fs;
use std::path::Path;

use log::info;

use crate::complex::{clique_lift, Graph};
use crate::error::{Error, Result};
use crate::fp::{build_operators, propagate_features, FpOperator, PropagatedFeatures};
use crate::higcn::{
    adam_step, embed, embed_backward, init_params, AdamConfig, AdamState, Head, HigcnParams, WeightDecay,
};
use crate::par;
use crate::sparse::DenseMatrix;

use super::config::{Readout, TaskConfig};
use super::metrics::{MetricsReport, RunMetrics};
use super::node::model_config;
use super::splits::kfold;

pub const FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub label: usize,
}

/// Graph-set text: each graph starts with `#graph n=<nodes> label=<class>`, followed
/// by its whitespace-separated edge lines.
pub fn parse_graph_set(text: &str, path: &Path) -> Result<Vec<LabeledGraph>> {
    let mut out = Vec::new();
    // (nodes, label, edges, header line)
    type Pending = Option<(usize, usize, Vec<(usize, usize)>, usize)>;
    let mut current: Pending = None;
    let finish = |cur: Pending, out: &mut Vec<LabeledGraph>| -> Result<()> {
        if let Some((n, label, edges, line)) = cur {
            let (graph, _) = Graph::from_edges(n, edges).map_err(|e| Error::parse(path, line, e.to_string()))?;
            out.push(LabeledGraph { graph, label });
        }
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#graph") {
            finish(current.take(), &mut out)?;
            let (mut n, mut label) = (None, None);
            for field in rest.split_whitespace() {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| Error::parse(path, lineno, format!("expected key=value, got {field:?}")))?;
                let value: usize =
                    value.parse().map_err(|_| Error::parse(path, lineno, format!("bad value in {field:?}")))?;
                match key {
                    "n" => n = Some(value),
                    "label" => label = Some(value),
                    _ => return Err(Error::parse(path, lineno, format!("unknown key {key:?}"))),
                }
            }
            let n = n.ok_or_else(|| Error::parse(path, lineno, "missing n="))?;
            let label = label.ok_or_else(|| Error::parse(path, lineno, "missing label="))?;
            current = Some((n, label, Vec::new(), lineno));
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some(cur) = current.as_mut() else {
            return Err(Error::parse(path, lineno, "edge before the first #graph header"));
        };
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(path, lineno, format!("bad edge {line:?}")))?;
        let [u, v] = ids[..] else {
            return Err(Error::parse(path, lineno, format!("expected two node ids, got {line:?}")));
        };
        cur.2.push((u, v));
    }
    finish(current, &mut out)?;
    Ok(out)
}

pub fn load_graph_set(path: &Path) -> Result<Vec<LabeledGraph>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph_set(&text, path)
}

pub fn write_graph_set(graphs: &[LabeledGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        out.push_str(&format!("#graph n={} label={}\n", g.graph.node_count(), g.label));
        for (u, v) in g.graph.edges() {
            out.push_str(&format!("{u}\t{v}\n"));
        }
    }
    out
}

/// One-hot degrees, clamped to `max_degree`.
pub fn degree_one_hot(g: &Graph, max_degree: usize) -> DenseMatrix {
    let deg = g.degrees();
    DenseMatrix::from_fn(g.node_count(), max_degree + 1, |v, c| f64::from(u8::from(deg[v].min(max_degree) == c)))
}

fn readout_rows(z: &DenseMatrix, readout: Readout) -> Vec<f64> {
    let mut r = vec![0.0; z.cols()];
    for i in 0..z.rows() {
        for (a, b) in r.iter_mut().zip(z.row(i)) {
            *a += b;
        }
    }
    if readout == Readout::Mean {
        let n = z.rows() as f64;
        r.iter_mut().for_each(|a| *a /= n);
    }
    r
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    logits.iter().map(|v| v - lse).collect()
}

/// Class log-probabilities for one graph: embed, read out, map by `W`.
pub fn graph_log_probs(params: &HigcnParams, feats: &PropagatedFeatures, readout: Readout) -> Result<Vec<f64>> {
    let tape = embed(params, feats)?;
    let r = readout_rows(&tape.z, readout);
    Ok(log_softmax(&DenseMatrix::from_vec(1, r.len(), r)?.matmul(&params.w)?.into_vec()))
}

pub fn predict_graph(params: &HigcnParams, feats: &PropagatedFeatures, readout: Readout) -> Result<usize> {
    let lp = graph_log_probs(params, feats, readout)?;
    Ok((1..lp.len()).fold(0, |best, j| if lp[j] > lp[best] { j } else { best }))
}

/// NLL of one graph scaled by `weight`, with its parameter gradient.
fn graph_loss_grad(
    params: &HigcnParams,
    feats: &PropagatedFeatures,
    label: usize,
    readout: Readout,
    weight: f64,
) -> Result<(f64, HigcnParams)> {
    let tape = embed(params, feats)?;
    let n = tape.z.rows();
    let r = readout_rows(&tape.z, readout);
    let rm = DenseMatrix::from_vec(1, r.len(), r)?;
    let lp = log_softmax(&rm.matmul(&params.w)?.into_vec());
    let loss = -weight * lp[label];
    let dlogits: Vec<f64> =
        lp.iter().enumerate().map(|(c, l)| weight * (l.exp() - f64::from(u8::from(c == label)))).collect();
    let dl = DenseMatrix::from_vec(1, dlogits.len(), dlogits)?;
    let dr = dl.matmul_t(&params.w)?;
    let per_row = if readout == Readout::Mean { 1.0 / n as f64 } else { 1.0 };
    let dz = DenseMatrix::from_fn(n, dr.cols(), |_, j| per_row * dr.get(0, j));
    let mut grads = embed_backward(params, feats, &tape, &dz)?;
    grads.w = rm.t_matmul(&dl)?;
    Ok((loss, grads))
}

struct Prepared {
    ops: Vec<Vec<FpOperator>>,
    labels: Vec<usize>,
    classes: usize,
}

fn prepare(graphs: &[LabeledGraph], orders: usize) -> Result<Prepared> {
    if graphs.is_empty() {
        return Err(Error::MissingData("graphs".into()));
    }
    if let Some(i) = graphs.iter().position(|g| g.graph.node_count() == 0) {
        return Err(Error::InvalidArgument(format!("graph {i} has no nodes")));
    }
    let ops = par::map_collect(graphs, |g| build_operators(&clique_lift(&g.graph, orders)?, orders))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<usize> = graphs.iter().map(|g| g.label).collect();
    let classes = labels.iter().max().map_or(1, |m| m + 1);
    Ok(Prepared { ops, labels, classes })
}

/// Node features for one fold: the graphs' own when every graph has them,
/// degree one-hots capped at the training fold's maximum degree otherwise.
fn fold_features(
    graphs: &[LabeledGraph],
    prep: &Prepared,
    train: &[usize],
    hops: usize,
) -> Result<Vec<PropagatedFeatures>> {
    let own = graphs.iter().all(|g| g.graph.features.is_some());
    let cap = train.iter().flat_map(|&i| graphs[i].graph.degrees()).max().unwrap_or(0);
    par::map_range(graphs.len(), |i| {
        let g = &graphs[i].graph;
        let x = match (&g.features, own) {
            (Some(x), true) => x.clone(),
            _ => degree_one_hot(g, cap),
        };
        propagate_features(&prep.ops[i], &x, hops)
    })
    .into_iter()
    .collect()
}

struct FoldCurve {
    val_accuracy: Vec<f64>,
    train_loss: Vec<f64>,
}

fn train_fold(
    prep: &Prepared,
    feats: &[PropagatedFeatures],
    train: &[usize],
    held: &[usize],
    config: &TaskConfig,
    seed: u64,
) -> Result<FoldCurve> {
    let dim = feats[0].feature_dim();
    if feats.iter().any(|f| f.feature_dim() != dim) {
        return Err(Error::DimensionMismatch("graphs have different feature widths".into()));
    }
    let mut params = init_params(model_config(config, dim, prep.classes, Head::LogSoftmax), seed)?;
    let mut state = AdamState::new(params.num_params());
    let adam = AdamConfig::with_lr(config.lr);
    let decay = WeightDecay { coeff: config.weight_decay(), include_gamma: config.decay_gamma };
    let weight = 1.0 / train.len() as f64;
    let mut curve = FoldCurve { val_accuracy: Vec::new(), train_loss: Vec::new() };
    for _ in 0..config.epochs() {
        let parts = par::map_collect(train, |&i| {
            graph_loss_grad(&params, &feats[i], prep.labels[i], config.readout, weight)
        });
        let mut loss = 0.0;
        let mut grads = params.zeros_like();
        for part in parts {
            let (l, g) = part?;
            loss += l;
            grads.add_scaled(&g, 1.0, true);
        }
        if decay.coeff != 0.0 {
            loss += 0.5 * decay.coeff * params.decay_norm_sq(decay.include_gamma);
            grads.add_scaled(&params, decay.coeff, decay.include_gamma);
        }
        if !loss.is_finite() {
            return Err(Error::NonFinite("graph classification loss".into()));
        }
        adam_step(&mut params, &grads, &mut state, &adam);
        let hits = held
            .iter()
            .map(|&i| predict_graph(&params, &feats[i], config.readout).map(|c| c == prep.labels[i]))
            .collect::<Result<Vec<bool>>>()?;
        curve.train_loss.push(loss);
        curve.val_accuracy.push(hits.iter().filter(|&&h| h).count() as f64 / held.len() as f64);
    }
    Ok(curve)
}

/// 10-fold cross-validation per seed. A run's value is the maximum over epochs of
/// the fold-averaged held-out accuracy.
pub fn graph_classify(graphs: &[LabeledGraph], config: &TaskConfig) -> Result<MetricsReport> {
    config.validate()?;
    let prep = prepare(graphs, config.orders)?;
    let mut runs = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let folds = kfold(graphs.len(), FOLDS, seed)?;
        let curves = par::map_range(folds.len(), |f| -> Result<FoldCurve> {
            let (train, held) = &folds[f];
            let feats = fold_features(graphs, &prep, train, config.hops)?;
            train_fold(&prep, &feats, train, held, config, seed.wrapping_add(f as u64))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let epochs = config.epochs();
        let mean_at = |e: usize, pick: fn(&FoldCurve) -> &Vec<f64>| {
            curves.iter().map(|c| pick(c)[e]).sum::<f64>() / curves.len() as f64
        };
        let val: Vec<f64> = (0..epochs).map(|e| mean_at(e, |c| &c.val_accuracy)).collect();
        let loss_curve: Vec<f64> = (0..epochs).map(|e| mean_at(e, |c| &c.train_loss)).collect();
        let best_epoch = (1..epochs).fold(0, |b, e| if val[e] > val[b] { e } else { b });
        info!("seed {seed}: best mean fold accuracy {:.4} at epoch {best_epoch}", val[best_epoch]);
        runs.push(RunMetrics {
            seed,
            value: val[best_epoch],
            best_epoch: Some(best_epoch),
            epochs_run: epochs,
            loss_curve,
            strength: None,
            flags: Vec::new(),
        });
    }
    Ok(MetricsReport::from_runs("graph_classification", "accuracy", runs))
}
