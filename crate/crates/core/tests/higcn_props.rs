use fp_core::complex::clique_lift;
use fp_core::fp::{build_operators, propagate_features, PropagatedFeatures};
use fp_core::higcn::{
    adam_step, embed, forward, init_params, loss_and_grad, AdamConfig, AdamState, Head, HigcnConfig, Objective,
    WeightDecay,
};
use fp_core::sparse::DenseMatrix;
use fp_core::synth;
use proptest::prelude::*;

fn config(orders: usize, hops: usize, d: usize, classes: usize, layers: usize) -> HigcnConfig {
    HigcnConfig { orders, hops, input_dim: d, hidden: 5, outputs: classes, alpha: 0.2, layers, head: Head::LogSoftmax }
}

fn features(n: usize, orders: usize, hops: usize, seed: u64) -> (fp_core::complex::Graph, PropagatedFeatures) {
    let g = synth::erdos_renyi(n, 0.4, seed);
    let x = DenseMatrix::from_fn(n, 3, |i, j| ((i * 31 + j * 17 + seed as usize) % 13) as f64 / 13.0 - 0.5);
    let ops = build_operators(&clique_lift(&g, orders).unwrap(), orders).unwrap();
    let feats = propagate_features(&ops, &x, hops).unwrap();
    (g.with_features(x).unwrap(), feats)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_softmax_rows_normalize(n in 3usize..25, orders in 1usize..=3, layers in 1usize..=2, seed in any::<u64>()) {
        let (_, feats) = features(n, orders, 4, seed);
        let params = init_params(config(orders, 4, 3, 4, layers), seed).unwrap();
        let out = forward(&params, &feats).unwrap().output;
        for r in 0..n {
            let s: f64 = out.row(r).iter().map(|v| v.exp()).sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn forward_is_permutation_equivariant(n in 3usize..25, seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (g, feats) = features(n, 2, 3, seed);
        let params = init_params(config(2, 3, 3, 3, 2), seed).unwrap();
        let base = forward(&params, &feats).unwrap().output;
        let perm = synth::random_permutation(n, perm_seed);
        let h = g.permuted(&perm).unwrap();
        let ops = build_operators(&clique_lift(&h, 2).unwrap(), 2).unwrap();
        let moved = forward(&params, &propagate_features(&ops, h.features.as_ref().unwrap(), 3).unwrap()).unwrap().output;
        for v in 0..n {
            for c in 0..3 {
                prop_assert!((moved.get(perm[v], c) - base.get(v, c)).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn uniform_logits_cost_log_classes() {
    let (_, feats) = features(12, 2, 3, 1);
    for classes in [2, 3, 7] {
        let mut params = init_params(config(2, 3, 3, classes, 1), 0).unwrap();
        params.w = DenseMatrix::zeros(params.w.rows(), classes);
        let labels: Vec<usize> = (0..12).map(|v| v % classes).collect();
        let mask: Vec<usize> = (0..12).collect();
        let (loss, grads) =
            loss_and_grad(&params, &feats, Objective::Nll(&labels), &mask, WeightDecay::default()).unwrap();
        assert!((loss - (classes as f64).ln()).abs() < 1e-12);
        // With W = 0 no signal reaches γ or Θ.
        assert!(grads.gamma.iter().flatten().all(|&g| g == 0.0));
    }
}

#[test]
fn order_one_filter_at_init_matches_appnp_iteration() {
    let (g, feats) = features(20, 1, 8, 5);
    let params = init_params(config(1, 8, 3, 2, 1), 3).unwrap();
    let filtered = &embed(&params, &feats).unwrap().petals[0].filtered;
    // Z ← (1−α) Ã Z + α X, starting from X, for K rounds.
    let a = build_operators(&clique_lift(&g, 1).unwrap(), 1).unwrap().remove(0).a_tilde;
    let x = g.features.as_ref().unwrap();
    let mut z = x.clone();
    for _ in 0..8 {
        let mut next = a.spmm_dense(&z).unwrap().map(|v| 0.8 * v);
        next.add_scaled(0.2, x).unwrap();
        z = next;
    }
    assert!(filtered.max_abs_diff(&z) < 1e-12, "{}", filtered.max_abs_diff(&z));
}

#[test]
fn adam_reduces_loss_on_a_separable_instance() {
    let g = synth::planted_two_block(40, 0.5, 0.02, 2);
    let labels = g.labels.clone().unwrap();
    let x = DenseMatrix::from_fn(40, 3, |v, j| match j {
        0 => labels[v] as f64,
        1 => 1.0 - labels[v] as f64,
        _ => 1.0,
    });
    let ops = build_operators(&clique_lift(&g, 2).unwrap(), 2).unwrap();
    let feats = propagate_features(&ops, &x, 4).unwrap();
    let mut params = init_params(config(2, 4, 3, 2, 2), 9).unwrap();
    let mut state = AdamState::new(params.num_params());
    let adam = AdamConfig::default();
    let mask: Vec<usize> = (0..40).step_by(2).collect();
    let mut losses = Vec::new();
    for _ in 0..50 {
        let (loss, grads) =
            loss_and_grad(&params, &feats, Objective::Nll(&labels), &mask, WeightDecay::default()).unwrap();
        losses.push(loss);
        adam_step(&mut params, &grads, &mut state, &adam);
    }
    let rises = losses.windows(2).filter(|w| w[1] > w[0] + 1e-9).count();
    assert!(rises <= 5, "{losses:?}");
    assert!(losses[49] < 0.5 * losses[0], "{} -> {}", losses[0], losses[49]);
}
