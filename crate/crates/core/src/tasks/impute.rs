use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::info;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Poisson};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::fp::{build_operators, propagate_features, PropagatedFeatures};
use crate::higcn::{adam_step, forward, init_params, loss_and_grad, AdamConfig, AdamState, Head, Objective, WeightDecay};
use crate::par;
use crate::sparse::DenseMatrix;
use crate::synth;

use super::config::TaskConfig;
use super::metrics::{kendall_tau, MetricsReport, RunMetrics};
use super::node::model_config;

/// Simplices with at most this many collaborations are dropped on ingestion.
pub const MIN_COLLABORATIONS: f64 = 2.0;

/// A complex whose simplices carry non-negative collaboration counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoauthorshipComplex {
    pub complex: SimplicialComplex,
    pub node_signal: Vec<f64>,
    /// `signals[p - 1][i]` belongs to `complex.simplex(p, i)`.
    pub signals: Vec<Vec<f64>>,
}

impl CoauthorshipComplex {
    /// Builds from `(nodes, signal)` records.
    ///
    /// Every node `0..n` needs exactly one single-node record. Multi-node records with
    /// signal `<= 2` are dropped; faces implied by the kept ones are added with the
    /// largest signal among the kept records containing them.
    pub fn from_records(records: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let n = records.iter().flat_map(|(s, _)| s.iter().map(|v| v + 1)).max().unwrap_or(0);
        let mut node_signal = vec![None; n];
        let mut explicit: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (mut s, signal) in records {
            if !(signal >= 0.0 && signal.is_finite()) {
                return Err(Error::InvalidArgument(format!("simplex {s:?} has invalid signal {signal}")));
            }
            s.sort_unstable();
            if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("malformed simplex {s:?}")));
            }
            if s.len() == 1 {
                if node_signal[s[0]].replace(signal).is_some() {
                    return Err(Error::InvalidArgument(format!("node {} listed twice", s[0])));
                }
            } else if explicit.insert(s.clone(), signal).is_some() {
                return Err(Error::InvalidArgument(format!("simplex {s:?} listed twice")));
            }
        }
        let node_signal = node_signal
            .into_iter()
            .enumerate()
            .map(|(v, s)| s.ok_or_else(|| Error::MissingData(format!("signal for node {v}"))))
            .collect::<Result<Vec<f64>>>()?;

        let kept: Vec<(Vec<usize>, f64)> =
            explicit.iter().filter(|(_, &sig)| sig > MIN_COLLABORATIONS).map(|(s, &sig)| (s.clone(), sig)).collect();
        let mut closed: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut implied: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (s, sig) in &kept {
            closed.insert(s.clone(), *sig);
            let m = s.len();
            for mask in 1u64..(1u64 << m) - 1 {
                if mask.count_ones() < 2 {
                    continue;
                }
                let face: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                let e = implied.entry(face).or_insert(f64::NEG_INFINITY);
                *e = e.max(*sig);
            }
        }
        for (face, sig) in implied {
            closed.entry(face).or_insert(sig);
        }
        let max_order = closed.keys().map(|s| s.len() - 1).max().unwrap_or(0);
        let mut lists = vec![Vec::new(); max_order];
        let mut signals = vec![Vec::new(); max_order];
        // BTreeMap order within one length is lexicographic, matching the complex.
        for (s, sig) in closed {
            let p = s.len() - 1;
            lists[p - 1].push(s);
            signals[p - 1].push(sig);
        }
        let complex = SimplicialComplex::from_simplices(n, lists)?;
        Ok(Self { complex, node_signal, signals })
    }

    pub fn node_count(&self) -> usize {
        self.complex.node_count()
    }

    /// `order<TAB>n1,n2,...<TAB>signal` per line; `#` starts a comment.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [order, nodes, signal] = fields[..] else {
                return Err(Error::parse(path, lineno, format!("expected 3 tab-separated fields, got {}", fields.len())));
            };
            let order: usize =
                order.trim().parse().map_err(|_| Error::parse(path, lineno, format!("bad order {order:?}")))?;
            let nodes = nodes
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(path, lineno, format!("bad node list {nodes:?}")))?;
            if nodes.len() != order + 1 {
                return Err(Error::parse(path, lineno, format!("order {order} needs {} nodes", order + 1)));
            }
            let signal: f64 =
                signal.trim().parse().map_err(|_| Error::parse(path, lineno, format!("bad signal {signal:?}")))?;
            records.push((nodes, signal));
        }
        Self::from_records(records).map_err(|e| match e {
            Error::InvalidArgument(msg) | Error::MissingData(msg) => Error::parse(path, 0, msg),
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Writes the (already filtered) complex in the loader's format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, s) in self.node_signal.iter().enumerate() {
            out.push_str(&format!("0\t{v}\t{s}\n"));
        }
        for p in 1..=self.complex.max_order() {
            for (s, sig) in self.complex.simplices(p).zip(&self.signals[p - 1]) {
                let ids: Vec<String> = s.iter().map(usize::to_string).collect();
                out.push_str(&format!("{p}\t{}\t{sig}\n", ids.join(",")));
            }
        }
        out
    }
}

/// Seeded synthetic coauthorship data.
///
/// Authors sit in communities of 20 and have log-normal productivity. Teams of
/// 2 to 4 authors, mostly within one community, publish `1 + Poisson(2·mean
/// productivity)` joint papers; each author also writes `Poisson(2·productivity)`
/// solo papers. A node's signal is its total paper count.
pub fn synthetic_coauthorship(authors: usize, seed: u64) -> Result<CoauthorshipComplex> {
    if authors < 20 {
        return Err(Error::InvalidArgument("need at least 20 authors".into()));
    }
    let mut rng = synth::rng(seed);
    let productivity: Vec<f64> = {
        let dist = LogNormal::new(0.0, 0.75).expect("valid parameters");
        (0..authors).map(|_| dist.sample(&mut rng)).collect()
    };
    let communities = authors / 20;
    let community = |v: usize| (v / 20).min(communities - 1);
    let members: Vec<Vec<usize>> = (0..communities).map(|c| (0..authors).filter(|&v| community(v) == c).collect()).collect();

    let poisson = |lambda: f64, rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        if lambda <= 0.0 {
            0.0
        } else {
            Poisson::new(lambda).expect("positive rate").sample(rng)
        }
    };
    let mut papers: Vec<f64> = productivity.iter().map(|&a| poisson(2.0 * a, &mut rng)).collect();
    let mut records = Vec::new();
    for c in 0..communities {
        for _ in 0..30 {
            let u: f64 = rng.random();
            let size = if u < 0.5 { 2 } else if u < 0.85 { 3 } else { 4 };
            let mut team: Vec<usize> = Vec::with_capacity(size);
            while team.len() < size {
                let pool = if rng.random::<f64>() < 0.1 { &members[rng.random_range(0..communities)] } else { &members[c] };
                let total: f64 = pool.iter().map(|&v| productivity[v]).sum();
                let mut target = rng.random::<f64>() * total;
                let mut pick = pool[pool.len() - 1];
                for &v in pool {
                    target -= productivity[v];
                    if target <= 0.0 {
                        pick = v;
                        break;
                    }
                }
                if !team.contains(&pick) {
                    team.push(pick);
                }
            }
            team.sort_unstable();
            if records.iter().any(|(s, _): &(Vec<usize>, f64)| *s == team) {
                continue;
            }
            let mean_a = team.iter().map(|&v| productivity[v]).sum::<f64>() / size as f64;
            let count = 1.0 + poisson(2.0 * mean_a, &mut rng);
            for &v in &team {
                papers[v] += count;
            }
            records.push((team, count));
        }
    }
    records.extend(papers.into_iter().enumerate().map(|(v, s)| (vec![v], s)));
    CoauthorshipComplex::from_records(records)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// One seeded masking-and-training run; returns Kendall tau over all nodes.
pub fn impute_run(
    cc: &CoauthorshipComplex,
    known_fraction: f64,
    config: &TaskConfig,
    seed: u64,
) -> Result<RunMetrics> {
    if !(known_fraction > 0.0 && known_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("known_fraction must be in (0, 1), got {known_fraction}")));
    }
    let n = cc.node_count();
    let known_count = (known_fraction * n as f64).round() as usize;
    if known_count == 0 || known_count >= n {
        return Err(Error::InvalidArgument(format!(
            "known_fraction {known_fraction} leaves {known_count} of {n} signals known"
        )));
    }
    let order = synth::random_permutation(n, seed);
    let known: Vec<usize> = {
        let mut k = order[..known_count].to_vec();
        k.sort_unstable();
        k
    };
    let truth = &cc.node_signal;
    let mut known_values: Vec<f64> = known.iter().map(|&v| truth[v]).collect();
    let fill = median(&mut known_values);
    let mean = known_values.iter().sum::<f64>() / known_count as f64;
    let sd = (known_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / known_count as f64).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    let mut observed = vec![(fill - mean) / sd; n];
    let mut target = vec![0.0; n];
    for &v in &known {
        observed[v] = (truth[v] - mean) / sd;
        target[v] = observed[v];
    }
    let x = DenseMatrix::from_fn(n, 2, |v, c| if c == 0 { observed[v] } else { 1.0 });
    let feats = imputation_features(cc, &x, config)?;

    let mut params = init_params(model_config(config, 2, 1, Head::Identity), seed)?;
    let mut state = AdamState::new(params.num_params());
    let adam = AdamConfig::with_lr(config.lr);
    let decay = WeightDecay { coeff: config.weight_decay(), include_gamma: config.decay_gamma };
    let mut loss_curve = Vec::with_capacity(config.epochs());
    for _ in 0..config.epochs() {
        let (loss, grads) = loss_and_grad(&params, &feats, Objective::L1(&target), &known, decay)?;
        loss_curve.push(loss);
        adam_step(&mut params, &grads, &mut state, &adam);
    }
    let predicted = forward(&params, &feats)?.output.column(0);
    let mut flags = Vec::new();
    let value = match kendall_tau(truth, &predicted) {
        Ok(t) => t,
        Err(Error::ConstantInput) => {
            flags.push("constant-signal".to_string());
            0.0
        }
        Err(e) => return Err(e),
    };
    info!("seed {seed}, known {known_fraction}: tau {value:.4}");
    Ok(RunMetrics { seed, value, best_epoch: None, epochs_run: loss_curve.len(), loss_curve, strength: None, flags })
}

fn imputation_features(cc: &CoauthorshipComplex, x: &DenseMatrix, config: &TaskConfig) -> Result<PropagatedFeatures> {
    let k = cc.complex.with_max_order(config.orders);
    let ops = build_operators(&k, config.orders)?;
    propagate_features(&ops, x, config.hops)
}

/// Masks a seeded `1 − known_fraction` of node signals per seed, fills them with the
/// median of the known ones, trains with an ℓ1 loss on the known entries and
/// reports Kendall tau between true and predicted signals over all nodes.
pub fn impute_signals(cc: &CoauthorshipComplex, known_fraction: f64, config: &TaskConfig) -> Result<MetricsReport> {
    config.validate()?;
    let runs = par::map_collect(&config.seeds, |&seed| impute_run(cc, known_fraction, config, seed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::from_runs("imputation", "kendall_tau", runs))
}
