//! Seeded graph generators for tests, benchmarks and the synthetic tasks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::complex::Graph;
use crate::sparse::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn cycle_graph(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|u| (u, (u + 1) % n)))
}

pub fn path_graph(n: usize) -> Graph {
    Graph::new(n, (0..n.saturating_sub(1)).map(|u| (u, u + 1)))
}

/// Center 0 joined to leaves `1..=leaves`.
pub fn star_graph(leaves: usize) -> Graph {
    Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v)))
}

/// Two disjoint triangles {0,1,2} and {3,4,5}.
pub fn two_triangles() -> Graph {
    Graph::new(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])
}

/// Triangular prism: triangles {0,1,2}, {3,4,5} joined by the matching i–(i+3).
pub fn prism_graph() -> Graph {
    Graph::new(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 4), (2, 5)])
}

/// Complete bipartite graph K_{3,3}: triangle-free and 3-regular like the prism.
pub fn k33_graph() -> Graph {
    Graph::new(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v))))
}

/// G(n, p) with every pair sampled in lexicographic order.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng(seed));
    perm
}

/// Two equal blocks; edges within a block with `p_in`, across with `p_out`.
/// Features are the block one-hot, labels the block id.
pub fn planted_two_block(n: usize, p_in: f64, p_out: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let block = |v: usize| usize::from(v >= n / 2);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(block).collect();
    let features = DenseMatrix::from_fn(n, 2, |v, c| f64::from(u8::from(block(v) == c)));
    Graph::new(n, edges).with_features(features).unwrap().with_labels(labels).unwrap()
}

/// Parameters of the triangle-membership node task.
///
/// The graph is a disjoint union of triangles and 4-cycles, so every node has
/// degree 2 and constant-per-gadget signals are fixed points of the order-1
/// operator. Label = parity of the number of triangles containing the node
/// (0 or 1 here). Features are `[1, z]` where `z` is shared by all nodes of a
/// gadget and drawn from `N(+shift/2, 1)` for triangles and `N(-shift/2, 1)` for
/// squares, so the order-1 view of a node is exactly its own `z`.
#[derive(Debug, Clone, Copy)]
pub struct TriangleTask {
    pub triangles: usize,
    pub squares: usize,
    pub shift: f64,
}

impl Default for TriangleTask {
    fn default() -> Self {
        // 96 + 104 = 200 nodes
        Self { triangles: 32, squares: 26, shift: 1.0 }
    }
}

impl TriangleTask {
    pub fn node_count(&self) -> usize {
        3 * self.triangles + 4 * self.squares
    }

    /// Fraction of nodes labelled 1.
    pub fn positive_prior(&self) -> f64 {
        (3 * self.triangles) as f64 / self.node_count() as f64
    }

    pub fn generate(&self, seed: u64) -> Graph {
        let mut r = rng(seed);
        let n = self.node_count();
        let mut edges = Vec::new();
        let mut labels = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        let mut next = 0;
        for gadget in 0..(self.triangles + self.squares) {
            let is_triangle = gadget < self.triangles;
            let size = if is_triangle { 3 } else { 4 };
            let mean = if is_triangle { self.shift / 2.0 } else { -self.shift / 2.0 };
            let eps: f64 = StandardNormal.sample(&mut r);
            let value = mean + eps;
            for i in 0..size {
                edges.push((next + i, next + (i + 1) % size));
                labels.push(usize::from(is_triangle));
                z.push(value);
            }
            next += size;
        }
        let perm = {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut r);
            p
        };
        let features = DenseMatrix::from_fn(n, 2, |v, c| if c == 0 { 1.0 } else { z[v] });
        Graph::new(n, edges)
            .with_features(features)
            .unwrap()
            .with_labels(labels)
            .unwrap()
            .permuted(&perm)
            .unwrap()
    }
}

/// Every connected graph on `n` nodes, one per isomorphism class.
///
/// Brute force: canonical form = smallest edge bitmask over all node
/// permutations. Meant for `n <= 7`.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n), "connected_graphs is for 1..=7 nodes");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        if !is_connected(n, &pairs, mask) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0u64, |acc, (_, &(u, v))| acc | 1 << index[perm[u]][perm[v]])
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            let edges = pairs.iter().enumerate().filter(|(i, _)| canon >> i & 1 == 1).map(|(_, &e)| e);
            out.push(Graph::new(n, edges));
        }
    }
    out
}

fn is_connected(n: usize, pairs: &[(usize, usize)], mask: u64) -> bool {
    let mut reached = 1u32;
    loop {
        let before = reached;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reached >> u & 1 == 1 || reached >> v & 1 == 1) {
                reached |= 1 << u | 1 << v;
            }
        }
        if reached == before {
            return reached.count_ones() as usize == n;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_have_expected_sizes() {
        assert_eq!(complete_graph(5).edge_count(), 10);
        assert_eq!(cycle_graph(6).edge_count(), 6);
        assert_eq!(path_graph(5).edge_count(), 4);
        assert_eq!(star_graph(3).degrees(), vec![3, 1, 1, 1]);
        assert!(prism_graph().degrees().iter().all(|&d| d == 3));
        assert!(k33_graph().degrees().iter().all(|&d| d == 3));
        assert_eq!(erdos_renyi(20, 0.3, 1), erdos_renyi(20, 0.3, 1));
    }

    #[test]
    fn triangle_task_structure() {
        let spec = TriangleTask::default();
        let g = spec.generate(3);
        assert_eq!(g.node_count(), 200);
        assert!(g.degrees().iter().all(|&d| d == 2));
        let labels = g.labels.as_ref().unwrap();
        assert_eq!(labels.iter().filter(|&&y| y == 1).count(), 96);
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21]);
    }
}
