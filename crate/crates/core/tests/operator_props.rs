use fp_core::complex::{clique_lift, incidence_matrix};
use fp_core::fp::{build_fp_adjacency, build_operators, propagate_features, walk_matrix};
use fp_core::sparse::{dense_sym_eig, DenseMatrix};
use fp_core::synth;
use proptest::prelude::*;

fn sorted_real_spectrum_of_similar(w: &DenseMatrix, d: &[f64]) -> Vec<f64> {
    // D^{-1/2} W D^{1/2} is symmetric when W = H D_h^{-1} Hᵀ D_v^{-1}.
    let n = w.rows();
    let sym = DenseMatrix::from_fn(n, n, |i, j| w.get(i, j) * d[j].sqrt() / d[i].sqrt());
    let sym = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (sym.get(i, j) + sym.get(j, i)));
    dense_sym_eig(&sym).unwrap().eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn walk_operator_is_similar_to_fp_adjacency(n in 4usize..30, p in 1usize..=2, seed in any::<u64>()) {
        let g = synth::erdos_renyi(n, 0.5, seed);
        let k = clique_lift(&g, p).unwrap();
        let h = incidence_matrix(&k, p).unwrap();
        let d: Vec<f64> = h.node_degrees().iter().map(|&x| x as f64).collect();
        prop_assume!(d.iter().all(|&x| x > 0.0));
        let a = build_fp_adjacency(&h);
        let w = walk_matrix(&h).to_dense();
        let at = a.a_tilde.to_dense();
        for i in 0..n {
            for j in 0..n {
                // Column-stochastic W gives Ã = D^{-1/2} W D^{1/2}.
                prop_assert!((at.get(i, j) - w.get(i, j) * d[j].sqrt() / d[i].sqrt()).abs() <= 1e-12);
            }
        }
        let s1 = dense_sym_eig(&at).unwrap().eigenvalues;
        let s2 = sorted_real_spectrum_of_similar(&w, &d);
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn walk_matrix_is_column_stochastic(n in 3usize..30, p in 1usize..=3, seed in any::<u64>()) {
        let g = synth::erdos_renyi(n, 0.6, seed);
        let h = incidence_matrix(&clique_lift(&g, p).unwrap(), p).unwrap();
        let w = walk_matrix(&h).to_dense();
        for (j, &d) in h.node_degrees().iter().enumerate() {
            let col: f64 = w.column(j).iter().sum();
            let ok = if d > 0 { (col - 1.0).abs() <= 1e-12 } else { col == 0.0 };
            prop_assert!(ok, "column {} sums to {}", j, col);
        }
    }

    #[test]
    fn sqrt_degree_vector_is_fixed(n in 3usize..40, p in 1usize..=3, seed in any::<u64>()) {
        let g = synth::erdos_renyi(n, 0.5, seed);
        let op = build_operators(&clique_lift(&g, p).unwrap(), p).unwrap().remove(p - 1);
        let root: Vec<f64> = op.node_degrees.iter().map(|&x| (x as f64).sqrt()).collect();
        let image = op.a_tilde.spmv(&root).unwrap();
        for (a, b) in image.iter().zip(&root) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn isolated_nodes_keep_only_the_identity_term(n in 3usize..30, seed in any::<u64>()) {
        let g = synth::erdos_renyi(n, 0.2, seed);
        let ops = build_operators(&clique_lift(&g, 2).unwrap(), 2).unwrap();
        let x = DenseMatrix::from_fn(n, 2, |i, j| (i * 3 + j) as f64);
        let feats = propagate_features(&ops, &x, 3).unwrap();
        for (p, op) in ops.iter().enumerate() {
            let l = op.laplacian().to_dense();
            for v in (0..n).filter(|&v| op.isolated[v]) {
                prop_assert_eq!(l.get(v, v), 1.0);
                prop_assert!(op.a_tilde.row(v).0.is_empty());
                prop_assert!(feats.blocks[p][1].row(v).iter().all(|&y| y == 0.0));
            }
        }
    }
}

#[test]
fn regular_graphs_have_the_all_ones_kernel() {
    // Equal petal degrees make D^{1/2}·1 parallel to 1.
    for g in [synth::cycle_graph(7), synth::complete_graph(6), synth::prism_graph(), synth::k33_graph()] {
        let n = g.node_count();
        let op = build_operators(&clique_lift(&g, 1).unwrap(), 1).unwrap().remove(0);
        let r = op.laplacian().spmv(&vec![1.0; n]).unwrap();
        assert!(r.iter().all(|v| v.abs() <= 1e-12), "{r:?}");
    }
}

#[test]
fn star_laplacian_does_not_annihilate_ones() {
    let op = build_operators(&clique_lift(&synth::star_graph(4), 1).unwrap(), 1).unwrap().remove(0);
    let r = op.laplacian().spmv(&[1.0; 5]).unwrap();
    // Hub row: 1 − ½(1 + 4·(1/2)) = −0.5.
    assert!((r[0] + 0.5).abs() < 1e-12);
}
