use crate::error::{Error, Result};
use crate::fp::PropagatedFeatures;
use crate::par;
use crate::sparse::DenseMatrix;

use super::params::{Head, HigcnParams, Transform};

/// Intermediates of one petal, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct PetalTape {
    /// `Σ_k γ_k Ã^k X`.
    pub filtered: DenseMatrix,
    /// First-map pre-activation (two-layer transforms only).
    pub hidden_pre: Option<DenseMatrix>,
    /// Petal output `Y_p`.
    pub output: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct EmbedTape {
    pub petals: Vec<PetalTape>,
    /// `Z = [Y_1 | … | Y_P]`.
    pub z: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct ForwardTape {
    pub embed: EmbedTape,
    pub logits: DenseMatrix,
    /// Head applied to `logits` (log-probabilities for [`Head::LogSoftmax`]).
    pub output: DenseMatrix,
}

/// Training objective over a subset of rows.
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    /// Mean negative log-likelihood of `labels[i]` under the log-softmax head.
    Nll(&'a [usize]),
    /// Mean absolute error between output column 0 and `targets[i]`.
    L1(&'a [f64]),
}

/// `coeff/2 · ‖θ‖²` added to the loss. `W` and every `Θ_p` always; `γ` on request.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightDecay {
    pub coeff: f64,
    pub include_gamma: bool,
}

fn check_features(params: &HigcnParams, feats: &PropagatedFeatures) -> Result<()> {
    let c = &params.config;
    if feats.orders() != c.orders || feats.hops != c.hops || feats.feature_dim() != c.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "model expects P={} K={} d={}, features have P={} K={} d={}",
            c.orders,
            c.hops,
            c.input_dim,
            feats.orders(),
            feats.hops,
            feats.feature_dim()
        )));
    }
    Ok(())
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

fn petal_forward(gamma: &[f64], theta: &Transform, blocks: &[DenseMatrix]) -> Result<PetalTape> {
    let mut filtered = DenseMatrix::zeros(blocks[0].rows(), blocks[0].cols());
    for (g, b) in gamma.iter().zip(blocks) {
        filtered.add_scaled(*g, b)?;
    }
    match theta {
        Transform::Linear { w } => {
            let output = filtered.matmul(w)?;
            Ok(PetalTape { filtered, hidden_pre: None, output })
        }
        Transform::TwoLayer { w1, w2 } => {
            let pre = filtered.matmul(w1)?;
            let output = pre.map(relu).matmul(w2)?;
            Ok(PetalTape { filtered, hidden_pre: Some(pre), output })
        }
    }
}

/// Node embeddings `Z` (before the output map).
pub fn embed(params: &HigcnParams, feats: &PropagatedFeatures) -> Result<EmbedTape> {
    check_features(params, feats)?;
    let petals = par::map_range(params.config.orders, |p| {
        petal_forward(&params.gamma[p], &params.theta[p], &feats.blocks[p])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let outputs: Vec<DenseMatrix> = petals.iter().map(|t| t.output.clone()).collect();
    let z = DenseMatrix::hcat(&outputs)?;
    Ok(EmbedTape { petals, z })
}

/// Gradients of `γ` and `Θ` given `∂L/∂Z`. The `w` slot of the result is zero.
pub fn embed_backward(
    params: &HigcnParams,
    feats: &PropagatedFeatures,
    tape: &EmbedTape,
    dz: &DenseMatrix,
) -> Result<HigcnParams> {
    if dz.shape() != tape.z.shape() {
        return Err(Error::DimensionMismatch(format!("dZ is {:?}, Z is {:?}", dz.shape(), tape.z.shape())));
    }
    let h = params.config.hidden;
    let parts = par::map_range(params.config.orders, |p| -> Result<(Vec<f64>, Transform)> {
        let dy = dz.column_block(p * h, h);
        let petal = &tape.petals[p];
        let (dtheta, ds) = match (&params.theta[p], &petal.hidden_pre) {
            (Transform::Linear { w }, _) => {
                (Transform::Linear { w: petal.filtered.t_matmul(&dy)? }, dy.matmul_t(w)?)
            }
            (Transform::TwoLayer { w1, w2 }, Some(pre)) => {
                let dw2 = pre.map(relu).t_matmul(&dy)?;
                let mut dpre = dy.matmul_t(w2)?;
                for (g, x) in dpre.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                    if *x <= 0.0 {
                        *g = 0.0;
                    }
                }
                let dw1 = petal.filtered.t_matmul(&dpre)?;
                (Transform::TwoLayer { w1: dw1, w2: dw2 }, dpre.matmul_t(w1)?)
            }
            (Transform::TwoLayer { .. }, None) => {
                return Err(Error::InvalidStructure("tape lacks hidden activations".into()))
            }
        };
        let dgamma = feats.blocks[p].iter().map(|b| ds.dot(b)).collect();
        Ok((dgamma, dtheta))
    });
    let mut grads = params.zeros_like();
    for (p, part) in parts.into_iter().enumerate() {
        let (dg, dt) = part?;
        grads.gamma[p] = dg;
        grads.theta[p] = dt;
    }
    Ok(grads)
}

fn log_softmax_rows(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        row.iter_mut().for_each(|v| *v -= lse);
    }
    out
}

/// Full forward pass over every node.
pub fn forward(params: &HigcnParams, feats: &PropagatedFeatures) -> Result<ForwardTape> {
    let embed = embed(params, feats)?;
    let logits = embed.z.matmul(&params.w)?;
    let output = match params.config.head {
        Head::LogSoftmax => log_softmax_rows(&logits),
        Head::Identity => logits.clone(),
    };
    Ok(ForwardTape { embed, logits, output })
}

/// Parameter gradients given `∂L/∂output`.
pub fn backward(
    params: &HigcnParams,
    feats: &PropagatedFeatures,
    tape: &ForwardTape,
    d_output: &DenseMatrix,
) -> Result<HigcnParams> {
    if d_output.shape() != tape.output.shape() {
        return Err(Error::DimensionMismatch(format!(
            "d_output is {:?}, output is {:?}",
            d_output.shape(),
            tape.output.shape()
        )));
    }
    let dlogits = match params.config.head {
        Head::Identity => d_output.clone(),
        Head::LogSoftmax => {
            let mut d = d_output.clone();
            for r in 0..d.rows() {
                let total: f64 = d.row(r).iter().sum();
                let lp = tape.output.row(r);
                for (g, l) in d.row_mut(r).iter_mut().zip(lp) {
                    *g -= l.exp() * total;
                }
            }
            d
        }
    };
    let dz = dlogits.matmul_t(&params.w)?;
    let mut grads = embed_backward(params, feats, &tape.embed, &dz)?;
    grads.w = tape.embed.z.t_matmul(&dlogits)?;
    Ok(grads)
}

/// Objective value (plus weight decay) and its gradient on the rows in `mask`.
pub fn loss_and_grad(
    params: &HigcnParams,
    feats: &PropagatedFeatures,
    objective: Objective<'_>,
    mask: &[usize],
    decay: WeightDecay,
) -> Result<(f64, HigcnParams)> {
    let tape = forward(params, feats)?;
    let (loss, grads) = loss_and_grad_with_tape(params, feats, &tape, objective, mask, decay)?;
    Ok((loss, grads))
}

/// Mean objective over `mask` for an already computed output (no decay term).
pub fn objective_value(output: &DenseMatrix, objective: Objective<'_>, mask: &[usize]) -> Result<f64> {
    Ok(objective_seed(output, objective, mask)?.0)
}

fn objective_seed(out: &DenseMatrix, objective: Objective<'_>, mask: &[usize]) -> Result<(f64, DenseMatrix)> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let n = out.rows();
    let scale = 1.0 / mask.len() as f64;
    let mut d = DenseMatrix::zeros(n, out.cols());
    let mut loss = 0.0;
    match objective {
        Objective::Nll(labels) => {
            if labels.len() != n {
                return Err(Error::DimensionMismatch(format!("{} labels for {n} nodes", labels.len())));
            }
            for &i in mask {
                let y = labels[i];
                if y >= out.cols() {
                    return Err(Error::InvalidArgument(format!("label {y} outside {} classes", out.cols())));
                }
                loss -= scale * out.get(i, y);
                d.set(i, y, d.get(i, y) - scale);
            }
        }
        Objective::L1(targets) => {
            if targets.len() != n {
                return Err(Error::DimensionMismatch(format!("{} targets for {n} nodes", targets.len())));
            }
            for &i in mask {
                let r = out.get(i, 0) - targets[i];
                loss += scale * r.abs();
                d.set(i, 0, d.get(i, 0) + scale * r.signum() * f64::from(u8::from(r != 0.0)));
            }
        }
    }
    Ok((loss, d))
}

/// As [`loss_and_grad`], reusing a tape from [`forward`] on the same parameters.
pub fn loss_and_grad_with_tape(
    params: &HigcnParams,
    feats: &PropagatedFeatures,
    tape: &ForwardTape,
    objective: Objective<'_>,
    mask: &[usize],
    decay: WeightDecay,
) -> Result<(f64, HigcnParams)> {
    let (mut loss, d) = objective_seed(&tape.output, objective, mask)?;
    let mut grads = backward(params, feats, tape, &d)?;
    if decay.coeff != 0.0 {
        loss += 0.5 * decay.coeff * params.decay_norm_sq(decay.include_gamma);
        grads.add_scaled(params, decay.coeff, decay.include_gamma);
    }
    if !loss.is_finite() {
        return Err(Error::NonFinite("loss".into()));
    }
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::clique_lift;
    use crate::fp::{build_operators, propagate_features};
    use crate::higcn::{init_params, HigcnConfig};
    use crate::synth;

    fn setup(layers: usize, head: Head) -> (HigcnParams, PropagatedFeatures) {
        let g = synth::erdos_renyi(12, 0.4, 3);
        let k = clique_lift(&g, 2).unwrap();
        let ops = build_operators(&k, 2).unwrap();
        let x = DenseMatrix::from_fn(12, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.3);
        let feats = propagate_features(&ops, &x, 3).unwrap();
        let outputs = if head == Head::Identity { 1 } else { 3 };
        let cfg = HigcnConfig { orders: 2, hops: 3, input_dim: 3, hidden: 4, outputs, alpha: 0.4, layers, head };
        (init_params(cfg, 11).unwrap(), feats)
    }

    fn fd_check(params: &HigcnParams, feats: &PropagatedFeatures, obj: Objective<'_>, decay: WeightDecay) {
        let mask: Vec<usize> = (0..12).step_by(2).collect();
        let (_, g) = loss_and_grad(params, feats, obj, &mask, decay).unwrap();
        let analytic = g.to_flat();
        let base = params.to_flat();
        let h = 1e-5;
        for i in 0..base.len() {
            let mut p = params.clone();
            let mut v = base.clone();
            v[i] += h;
            p.assign_flat(&v).unwrap();
            let up = loss_and_grad(&p, feats, obj, &mask, decay).unwrap().0;
            v[i] -= 2.0 * h;
            p.assign_flat(&v).unwrap();
            let down = loss_and_grad(&p, feats, obj, &mask, decay).unwrap().0;
            let fd = (up - down) / (2.0 * h);
            let rel = (analytic[i] - fd).abs() / analytic[i].abs().max(fd.abs()).max(1e-6);
            assert!(rel < 1e-4, "param {i}: analytic {} fd {fd}", analytic[i]);
        }
    }

    #[test]
    fn nll_gradients_match_finite_differences() {
        for layers in [1, 2] {
            let (p, f) = setup(layers, Head::LogSoftmax);
            let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
            fd_check(&p, &f, Objective::Nll(&labels), WeightDecay { coeff: 0.01, include_gamma: true });
        }
    }

    #[test]
    fn l1_gradients_match_finite_differences() {
        let (p, f) = setup(2, Head::Identity);
        let targets: Vec<f64> = (0..12).map(|i| (i as f64).sin() * 3.0).collect();
        fd_check(&p, &f, Objective::L1(&targets), WeightDecay::default());
    }

    #[test]
    fn log_softmax_rows_normalize() {
        let (p, f) = setup(2, Head::LogSoftmax);
        let t = forward(&p, &f).unwrap();
        for r in 0..t.output.rows() {
            let s: f64 = t.output.row(r).iter().map(|v| v.exp()).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(t.embed.z.shape(), (12, 8));
    }

    #[test]
    fn rejects_bad_inputs() {
        let (p, f) = setup(1, Head::LogSoftmax);
        let labels = vec![0; 12];
        assert!(matches!(
            loss_and_grad(&p, &f, Objective::Nll(&labels), &[], WeightDecay::default()),
            Err(Error::EmptyMask)
        ));
        let bad = vec![5; 12];
        assert!(loss_and_grad(&p, &f, Objective::Nll(&bad), &[0], WeightDecay::default()).is_err());
        let mut q = p.clone();
        q.config.hops = 4;
        assert!(matches!(forward(&q, &f), Err(Error::DimensionMismatch(_))));
    }
}
