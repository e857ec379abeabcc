use log::{debug, info};

use crate::complex::{clique_lift, Graph};
use crate::error::{Error, Result};
use crate::fp::{build_operators, propagate_features, PropagatedFeatures};
use crate::higcn::{
    adam_step, forward, init_params, loss_and_grad_with_tape, objective_value, strength, AdamConfig, AdamState,
    Head, HigcnConfig, HigcnParams, Objective, WeightDecay,
};
use crate::par;
use crate::sparse::DenseMatrix;

use super::config::TaskConfig;
use super::metrics::{accuracy, MetricsReport, RunMetrics};
use super::splits::{make_splits, SplitSpec, DEFAULT_RATIOS};

/// Result of one seeded training run.
#[derive(Debug, Clone)]
pub struct NodeRun {
    pub test_accuracy: f64,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub epochs_run: usize,
    pub loss_curve: Vec<f64>,
    /// Parameters at the best-validation epoch.
    pub params: HigcnParams,
}

/// Lift with `orders`, build every FP adjacency and propagate the graph's features.
pub fn prepare_node_features(g: &Graph, orders: usize, hops: usize) -> Result<PropagatedFeatures> {
    let x = g.features.as_ref().ok_or_else(|| Error::MissingData("node features".into()))?;
    let k = clique_lift(g, orders)?;
    let ops = build_operators(&k, orders)?;
    propagate_features(&ops, x, hops)
}

/// Row-wise argmax; the first maximum wins.
pub fn argmax_rows(m: &DenseMatrix) -> Vec<usize> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            (1..row.len()).fold(0, |best, j| if row[j] > row[best] { j } else { best })
        })
        .collect()
}

pub(crate) fn model_config(config: &TaskConfig, input_dim: usize, outputs: usize, head: Head) -> HigcnConfig {
    HigcnConfig {
        orders: config.orders,
        hops: config.hops,
        input_dim,
        hidden: config.hidden,
        outputs,
        alpha: config.alpha,
        layers: config.layers,
        head,
    }
}

/// Full-batch Adam on the training rows with early stopping on validation loss.
/// Reports test accuracy at the epoch with the lowest validation loss.
pub fn train_node_run(
    feats: &PropagatedFeatures,
    labels: &[usize],
    classes: usize,
    split: &SplitSpec,
    config: &TaskConfig,
    seed: u64,
) -> Result<NodeRun> {
    if split.train.is_empty() || split.val.is_empty() || split.test.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut params = init_params(model_config(config, feats.feature_dim(), classes, Head::LogSoftmax), seed)?;
    let mut state = AdamState::new(params.num_params());
    let adam = AdamConfig::with_lr(config.lr);
    let decay = WeightDecay { coeff: config.weight_decay(), include_gamma: config.decay_gamma };
    let objective = Objective::Nll(labels);

    let mut best: Option<NodeRun> = None;
    let mut loss_curve = Vec::with_capacity(config.epochs());
    let mut epochs_run = 0;
    for epoch in 0..config.epochs() {
        let tape = forward(&params, feats)?;
        let val_loss = objective_value(&tape.output, objective, &split.val)?;
        match &best {
            Some(b) if val_loss >= b.best_val_loss => {
                if epoch - b.best_epoch >= config.patience {
                    debug!("seed {seed}: early stop at epoch {epoch}");
                    break;
                }
            }
            _ => {
                let test_accuracy = accuracy(&argmax_rows(&tape.output), labels, &split.test);
                best = Some(NodeRun {
                    test_accuracy,
                    best_epoch: epoch,
                    best_val_loss: val_loss,
                    epochs_run: 0,
                    loss_curve: Vec::new(),
                    params: params.clone(),
                });
            }
        }
        let (loss, grads) = loss_and_grad_with_tape(&params, feats, &tape, objective, &split.train, decay)?;
        loss_curve.push(loss);
        adam_step(&mut params, &grads, &mut state, &adam);
        epochs_run = epoch + 1;
    }
    let mut run = best.expect("at least one epoch");
    run.epochs_run = epochs_run;
    run.loss_curve = loss_curve;
    Ok(run)
}

/// Lift, propagate, then one seeded 60/20/20 split and training run per seed.
pub fn train_node_classification(g: &Graph, config: &TaskConfig) -> Result<MetricsReport> {
    Ok(train_node_runs(g, config)?.0)
}

/// As [`train_node_classification`], also returning each run (with its parameters).
pub fn train_node_runs(g: &Graph, config: &TaskConfig) -> Result<(MetricsReport, Vec<NodeRun>)> {
    config.validate()?;
    let labels = g.labels.as_ref().ok_or_else(|| Error::MissingData("node labels".into()))?;
    let classes = g.num_classes().unwrap_or(0).max(1);
    let feats = prepare_node_features(g, config.orders, config.hops)?;
    let runs = par::map_collect(&config.seeds, |&seed| -> Result<NodeRun> {
        let split = make_splits(g.node_count(), DEFAULT_RATIOS, seed)?;
        let run = train_node_run(&feats, labels, classes, &split, config, seed)?;
        info!("seed {seed}: test accuracy {:.4} at epoch {}", run.test_accuracy, run.best_epoch);
        Ok(run)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let metrics = config
        .seeds
        .iter()
        .zip(&runs)
        .map(|(&seed, run)| RunMetrics {
            seed,
            value: run.test_accuracy,
            best_epoch: Some(run.best_epoch),
            epochs_run: run.epochs_run,
            loss_curve: run.loss_curve.clone(),
            strength: Some(strength(&run.params)),
            flags: Vec::new(),
        })
        .collect();
    Ok((MetricsReport::from_runs("node_classification", "accuracy", metrics), runs))
}
