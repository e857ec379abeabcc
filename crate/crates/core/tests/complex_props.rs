use fp_core::complex::{clique_lift, incidence_matrix, Graph};
use fp_core::synth;
use proptest::prelude::*;

/// Every node subset of size `p + 1` whose pairs are all adjacent, by brute force.
fn brute_force_cliques(g: &Graph, p: usize) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let adj = g.adjacency_matrix().to_dense();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != p + 1 {
            continue;
        }
        let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let clique = nodes.iter().enumerate().all(|(i, &u)| nodes[i + 1..].iter().all(|&v| adj.get(u, v) != 0.0));
        if clique {
            out.push(nodes);
        }
    }
    out.sort();
    out
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=12, 0.0..0.9f64, any::<u64>()).prop_map(|(n, p, seed)| synth::erdos_renyi(n, p, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lift_matches_subset_enumeration(g in small_graph(), max_order in 1usize..=4) {
        let k = clique_lift(&g, max_order).unwrap();
        for p in 1..=max_order {
            let got: Vec<Vec<usize>> = k.simplices(p).map(<[usize]>::to_vec).collect();
            prop_assert_eq!(got, brute_force_cliques(&g, p));
        }
    }

    #[test]
    fn incidence_mass_is_p_plus_one_per_simplex(g in small_graph(), p in 1usize..=3) {
        let k = clique_lift(&g, 3).unwrap();
        let h = incidence_matrix(&k, p).unwrap();
        let mass: f64 = h.h.values().iter().sum();
        prop_assert_eq!(mass, ((p + 1) * k.count(p)) as f64);
        prop_assert_eq!(h.node_degrees().iter().sum::<usize>(), (p + 1) * k.count(p));
    }

    #[test]
    fn relabeling_preserves_counts(g in small_graph(), seed in any::<u64>()) {
        let perm = synth::random_permutation(g.node_count(), seed);
        let a = clique_lift(&g, 3).unwrap();
        let b = clique_lift(&g.permuted(&perm).unwrap(), 3).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
    }
}

#[test]
fn downward_closure_on_random_graphs() {
    for seed in 0..50 {
        let g = synth::erdos_renyi(16 + (seed as usize * 11) % 49, 0.3, seed);
        clique_lift(&g, 3).unwrap().check_downward_closure().unwrap();
    }
}
