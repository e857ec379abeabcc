use std::cmp::Ordering;

use crate::error::{Error, Result};

use super::Graph;

/// Default highest simplex order for lifting.
pub const DEFAULT_MAX_ORDER: usize = 2;

/// Per-order sorted simplex lists for orders `1..=max_order`.
///
/// Each p-simplex is a strictly increasing tuple of `p + 1` node ids; the list for
/// order `p` is lexicographically sorted and duplicate-free. Nodes (order 0) are
/// implicit: every id below `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    /// `flat[p - 1]` holds the order-p simplices back to back, `p + 1` ids each.
    flat: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Builds a complex from explicit simplex lists (`lists[p - 1]` = order-p simplices).
    ///
    /// Tuples are sorted and deduplicated. Fails if a tuple has the wrong length,
    /// repeats a node, references a node `>= n`, or a face is missing.
    pub fn from_simplices(n: usize, lists: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut flat = Vec::with_capacity(lists.len());
        for (i, mut list) in lists.into_iter().enumerate() {
            let p = i + 1;
            for s in &mut list {
                if s.len() != p + 1 {
                    return Err(Error::InvalidArgument(format!("order-{p} simplex {s:?} needs {} nodes", p + 1)));
                }
                s.sort_unstable();
                if s.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidArgument(format!("simplex {s:?} repeats a node")));
                }
                if s[p] >= n {
                    return Err(Error::InvalidArgument(format!("simplex {s:?} references a node >= {n}")));
                }
            }
            list.sort_unstable();
            list.dedup();
            flat.push(list.concat());
        }
        let k = Self { n, flat };
        k.check_downward_closure()?;
        Ok(k)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Keeps orders `1..=max_order`, padding with empty orders where needed.
    pub fn with_max_order(&self, max_order: usize) -> Self {
        let mut flat: Vec<Vec<usize>> = self.flat.iter().take(max_order).cloned().collect();
        flat.resize(max_order, Vec::new());
        Self { n: self.n, flat }
    }

    pub fn max_order(&self) -> usize {
        self.flat.len()
    }

    /// `n_p`; zero for orders above `max_order`. `count(0)` is the node count.
    pub fn count(&self, p: usize) -> usize {
        match p {
            0 => self.n,
            p if p <= self.flat.len() => self.flat[p - 1].len() / (p + 1),
            _ => 0,
        }
    }

    /// `[n, n_1, ..., n_P]`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.max_order()).map(|p| self.count(p)).collect()
    }

    /// Order-p simplices in lexicographic order.
    pub fn simplices(&self, p: usize) -> std::slice::ChunksExact<'_, usize> {
        assert!(p >= 1, "order-0 simplices are implicit");
        match self.flat.get(p - 1) {
            Some(f) => f.chunks_exact(p + 1),
            None => [].chunks_exact(p + 1),
        }
    }

    pub fn simplex(&self, p: usize, index: usize) -> &[usize] {
        &self.flat[p - 1][index * (p + 1)..(index + 1) * (p + 1)]
    }

    /// Position of a sorted simplex within its order's list.
    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let p = simplex.len().checked_sub(1)?;
        if p == 0 {
            return (simplex[0] < self.n).then_some(simplex[0]);
        }
        let count = self.count(p);
        let (mut lo, mut hi) = (0, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.simplex(p, mid).cmp(simplex) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Every (p−1)-face of every stored p-simplex is stored (faces of order ≥ 1).
    pub fn check_downward_closure(&self) -> Result<()> {
        for p in 2..=self.max_order() {
            for s in self.simplices(p) {
                for skip in 0..s.len() {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    if self.index_of(&face).is_none() {
                        return Err(Error::InvalidArgument(format!("face {face:?} of {s:?} is missing")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Clique-complex lifting: every (p+1)-clique of `g` becomes a p-simplex, for `1 ≤ p ≤ max_order`.
///
/// Cliques grow one node at a time; a clique is extended only by common neighbors
/// whose id exceeds its largest member, so each clique is produced once and the
/// output comes out in lexicographic order.
pub fn clique_lift(g: &Graph, max_order: usize) -> Result<SimplicialComplex> {
    if max_order == 0 {
        return Err(Error::InvalidArgument("max_order must be >= 1".into()));
    }
    let adj = g.adjacency_lists();
    let n = g.node_count();
    let mut flat: Vec<Vec<usize>> = Vec::with_capacity(max_order);
    flat.push(g.edges().iter().flat_map(|&(u, v)| [u, v]).collect());

    for p in 2..=max_order {
        let prev = &flat[p - 2];
        let mut next = Vec::new();
        for clique in prev.chunks_exact(p) {
            let last = clique[p - 1];
            // candidates: neighbors of the first member above `last`, adjacent to all others
            let first_nbrs = &adj[clique[0]];
            let start = first_nbrs.partition_point(|&w| w <= last);
            for &w in &first_nbrs[start..] {
                let adjacent_to_all = clique[1..].iter().all(|&m| adj[m].binary_search(&w).is_ok());
                if adjacent_to_all {
                    next.extend_from_slice(clique);
                    next.push(w);
                }
            }
        }
        let empty = next.is_empty();
        flat.push(next);
        if empty {
            // no larger cliques can exist
            for _ in (p + 1)..=max_order {
                flat.push(Vec::new());
            }
            break;
        }
    }
    Ok(SimplicialComplex { n, flat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    /// Checks every node subset of size `2..=P+1` for being a clique.
    fn brute_force_cliques(g: &Graph, max_order: usize) -> Vec<Vec<Vec<usize>>> {
        let n = g.node_count();
        let adj = g.adjacency_lists();
        let mut out = vec![Vec::new(); max_order];
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size < 2 || size > max_order + 1 {
                continue;
            }
            let nodes: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let clique = nodes
                .iter()
                .enumerate()
                .all(|(i, &u)| nodes[i + 1..].iter().all(|&v| adj[u].binary_search(&v).is_ok()));
            if clique {
                out[size - 2].push(nodes);
            }
        }
        for list in &mut out {
            list.sort();
        }
        out
    }

    #[test]
    fn complete_graph_counts() {
        let k = clique_lift(&synth::complete_graph(4), 3).unwrap();
        assert_eq!(k.counts(), vec![4, 6, 4, 1]);
    }

    #[test]
    fn cycle_and_two_triangles() {
        let k = clique_lift(&synth::cycle_graph(6), 2).unwrap();
        assert_eq!((k.count(1), k.count(2)), (6, 0));
        let k = clique_lift(&synth::two_triangles(), 2).unwrap();
        assert_eq!((k.count(1), k.count(2)), (6, 2));
        assert_eq!(k.simplex(2, 1), &[3, 4, 5]);
    }

    #[test]
    fn matches_subset_enumeration() {
        for seed in 0..30 {
            let n = 4 + (seed as usize % 9);
            let g = synth::erdos_renyi(n, 0.5, seed);
            let k = clique_lift(&g, 4).unwrap();
            let oracle = brute_force_cliques(&g, 4);
            for p in 1..=4 {
                let got: Vec<Vec<usize>> = k.simplices(p).map(<[usize]>::to_vec).collect();
                assert_eq!(got, oracle[p - 1], "seed {seed}, order {p}");
            }
        }
    }

    #[test]
    fn downward_closure_on_random_graphs() {
        for seed in 0..50 {
            let g = synth::erdos_renyi(16 + (seed as usize % 49), 0.3, 1000 + seed);
            let k = clique_lift(&g, 3).unwrap();
            k.check_downward_closure().unwrap();
            for p in 1..=3 {
                let list: Vec<&[usize]> = k.simplices(p).collect();
                assert!(list.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn from_simplices_validates_closure() {
        assert!(SimplicialComplex::from_simplices(3, vec![vec![vec![0, 1]], vec![vec![0, 1, 2]]]).is_err());
        let k = SimplicialComplex::from_simplices(
            3,
            vec![vec![vec![1, 0], vec![0, 2], vec![1, 2], vec![0, 1]], vec![vec![2, 0, 1]]],
        )
        .unwrap();
        assert_eq!(k.counts(), vec![3, 3, 1]);
        assert_eq!(k.index_of(&[1, 2]), Some(2));
        assert_eq!(k.index_of(&[0, 1, 2]), Some(0));
    }
}
