use serde::{Deserialize, Serialize};

use super::params::HigcnParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig { lr, ..Default::default() }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 0.01, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }
}

/// One bias-corrected Adam step on a flat vector.
pub fn adam_update(x: &mut [f64], grad: &[f64], state: &mut AdamState, cfg: &AdamConfig) {
    assert_eq!(x.len(), grad.len(), "parameter and gradient lengths differ");
    if state.m.len() != x.len() {
        *state = AdamState::new(x.len());
    }
    state.t += 1;
    let c1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let c2 = 1.0 - cfg.beta2.powi(state.t as i32);
    for i in 0..x.len() {
        let g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let mhat = state.m[i] / c1;
        let vhat = state.v[i] / c2;
        x[i] -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
    }
}

pub fn adam_step(params: &mut HigcnParams, grads: &HigcnParams, state: &mut AdamState, cfg: &AdamConfig) {
    let mut x = params.to_flat();
    adam_update(&mut x, &grads.to_flat(), state, cfg);
    params.assign_flat(&x).expect("flat length is preserved");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_half_square() {
        let cfg = AdamConfig::with_lr(0.1);
        let mut x = vec![1.0];
        let mut s = AdamState::default();
        for _ in 0..200 {
            let g = x.clone();
            adam_update(&mut x, &g, &mut s, &cfg);
        }
        assert!(x[0].abs() < 1e-3, "{}", x[0]);
    }

    #[test]
    fn first_step_has_size_lr() {
        let cfg = AdamConfig::with_lr(0.05);
        let mut x = vec![3.0, -2.0];
        let mut s = AdamState::default();
        adam_update(&mut x, &[10.0, -0.001], &mut s, &cfg);
        assert!((x[0] - 2.95).abs() < 1e-6);
        assert!((x[1] + 1.95).abs() < 1e-4);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let cfg = AdamConfig::default();
        let mut x = vec![0.7, -1.3];
        let mut s = AdamState::default();
        for _ in 0..5 {
            adam_update(&mut x, &[0.0, 0.0], &mut s, &cfg);
        }
        assert_eq!(x, vec![0.7, -1.3]);
    }
}
