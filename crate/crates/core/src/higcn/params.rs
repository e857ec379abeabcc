use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::DenseMatrix;
use crate::synth;

/// Output head applied to `Z·W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Head {
    /// Row-wise log-softmax (class log-probabilities).
    LogSoftmax,
    /// Raw outputs (regression).
    Identity,
}

/// Per-order feature transform `Θ_p`.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Linear { w: DenseMatrix },
    TwoLayer { w1: DenseMatrix, w2: DenseMatrix },
}

impl Transform {
    pub fn output_dim(&self) -> usize {
        match self {
            Transform::Linear { w } => w.cols(),
            Transform::TwoLayer { w2, .. } => w2.cols(),
        }
    }

    fn matrices(&self) -> Vec<&DenseMatrix> {
        match self {
            Transform::Linear { w } => vec![w],
            Transform::TwoLayer { w1, w2 } => vec![w1, w2],
        }
    }

    fn matrices_mut(&mut self) -> Vec<&mut DenseMatrix> {
        match self {
            Transform::Linear { w } => vec![w],
            Transform::TwoLayer { w1, w2 } => vec![w1, w2],
        }
    }
}

/// Architecture hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HigcnConfig {
    /// Highest petal order `P`.
    pub orders: usize,
    /// Highest hop `K`.
    pub hops: usize,
    pub input_dim: usize,
    pub hidden: usize,
    pub outputs: usize,
    /// Filter initialization constant, in `(0, 1]`.
    pub alpha: f64,
    /// 1 or 2 linear maps in each `Θ_p`.
    pub layers: usize,
    pub head: Head,
}

impl HigcnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if self.orders == 0 || self.input_dim == 0 || self.hidden == 0 || self.outputs == 0 {
            return Err(Error::InvalidArgument("orders, input_dim, hidden and outputs must be >= 1".into()));
        }
        if !matches!(self.layers, 1 | 2) {
            return Err(Error::InvalidArgument(format!("layers must be 1 or 2, got {}", self.layers)));
        }
        Ok(())
    }
}

/// Trainable parameters plus the configuration that shaped them.
#[derive(Debug, Clone, PartialEq)]
pub struct HigcnParams {
    pub config: HigcnConfig,
    /// Seed used at initialization (carried into checkpoints).
    pub seed: u64,
    /// `gamma[p][k]`, `P × (K+1)`.
    pub gamma: Vec<Vec<f64>>,
    pub theta: Vec<Transform>,
    /// `(P·h) × outputs`.
    pub w: DenseMatrix,
}

/// One filter row: `α(1−α)^k` for `k < K`, and `(1−α)^K` at `k = K`. Sums to 1.
///
/// The tail is stored as `1 − Σ_{k<K} γ_k`, which equals `(1−α)^K` in exact
/// arithmetic and keeps the summed row within an ulp of 1.
pub fn gamma_init(alpha: f64, hops: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..hops).map(|k| alpha * (1.0 - alpha).powi(k as i32)).collect();
    let head: f64 = row.iter().sum();
    row.push(1.0 - head);
    row
}

fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix {
    let s = (6.0 / (rows + cols) as f64).sqrt();
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-s..=s))
}

/// Seeded initialization: filter rows from [`gamma_init`], matrices Glorot-uniform.
pub fn init_params(config: HigcnConfig, seed: u64) -> Result<HigcnParams> {
    config.validate()?;
    let mut rng = synth::rng(seed);
    let gamma = vec![gamma_init(config.alpha, config.hops); config.orders];
    let theta = (0..config.orders)
        .map(|_| match config.layers {
            1 => Transform::Linear { w: glorot(config.input_dim, config.hidden, &mut rng) },
            _ => Transform::TwoLayer {
                w1: glorot(config.input_dim, config.hidden, &mut rng),
                w2: glorot(config.hidden, config.hidden, &mut rng),
            },
        })
        .collect();
    let w = glorot(config.orders * config.hidden, config.outputs, &mut rng);
    Ok(HigcnParams { config, seed, gamma, theta, w })
}

/// `S_p = Σ_k |γ_{p,k}|` for every order.
pub fn strength(params: &HigcnParams) -> Vec<f64> {
    params.gamma.iter().map(|row| row.iter().map(|g| g.abs()).sum()).collect()
}

impl HigcnParams {
    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.map_inplace(|_| 0.0);
        z
    }

    pub fn num_params(&self) -> usize {
        self.gamma.iter().map(Vec::len).sum::<usize>()
            + self.theta.iter().flat_map(Transform::matrices).map(|m| m.as_slice().len()).sum::<usize>()
            + self.w.as_slice().len()
    }

    /// Gamma rows, then each `Θ_p` (first map, then second), then `W`; row-major.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for row in &self.gamma {
            out.extend_from_slice(row);
        }
        for m in self.theta.iter().flat_map(Transform::matrices) {
            out.extend_from_slice(m.as_slice());
        }
        out.extend_from_slice(self.w.as_slice());
        out
    }

    /// Inverse of [`to_flat`](Self::to_flat).
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} parameters",
                flat.len(),
                self.num_params()
            )));
        }
        let mut it = flat.iter().copied();
        for row in &mut self.gamma {
            row.iter_mut().for_each(|g| *g = it.next().unwrap());
        }
        for m in self.theta.iter_mut().flat_map(Transform::matrices_mut) {
            m.as_mut_slice().iter_mut().for_each(|v| *v = it.next().unwrap());
        }
        self.w.as_mut_slice().iter_mut().for_each(|v| *v = it.next().unwrap());
        Ok(())
    }

    fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        let flat: Vec<f64> = self.to_flat().into_iter().map(f).collect();
        self.assign_flat(&flat).expect("same length");
    }

    /// Squared norm of `Θ` and `W` (and of `γ` when `include_gamma`).
    pub fn decay_norm_sq(&self, include_gamma: bool) -> f64 {
        let mut s: f64 = self.theta.iter().flat_map(Transform::matrices).map(DenseMatrix::sum_squares).sum();
        s += self.w.sum_squares();
        if include_gamma {
            s += self.gamma.iter().flatten().map(|g| g * g).sum::<f64>();
        }
        s
    }

    /// `self += scale · other` over every parameter; `gamma` only when `include_gamma`.
    pub(crate) fn add_scaled(&mut self, other: &HigcnParams, scale: f64, include_gamma: bool) {
        if include_gamma {
            for (a, b) in self.gamma.iter_mut().flatten().zip(other.gamma.iter().flatten()) {
                *a += scale * b;
            }
        }
        for (a, b) in self.theta.iter_mut().zip(&other.theta) {
            for (ma, mb) in a.matrices_mut().into_iter().zip(b.matrices()) {
                ma.add_scaled(scale, mb).expect("same shapes");
            }
        }
        self.w.add_scaled(scale, &other.w).expect("same shapes");
    }
}
