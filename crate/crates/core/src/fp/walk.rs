use crate::complex::IncidenceMatrix;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Occupation probabilities of a walker over the nodes, for one petal order.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub order: usize,
    pub pi: Vec<f64>,
}

impl WalkState {
    pub fn total_mass(&self) -> f64 {
        self.pi.iter().sum()
    }
}

/// Runs `steps / 2` complete core→petal→core walks.
///
/// Upward, a walker on node `u` moves to each simplex containing it with
/// probability `1 / d_p(u)`; downward, a walker on simplex `σ` moves to each of
/// its `p + 1` nodes uniformly.
pub fn two_step_walk(h: &IncidenceMatrix, pi0: &WalkState, steps: usize) -> Result<WalkState> {
    if steps < 2 || !steps.is_multiple_of(2) {
        return Err(Error::OddSteps(steps));
    }
    let n = h.node_count();
    if pi0.pi.len() != n {
        return Err(Error::DimensionMismatch(format!("walk state has {} entries, complex has {n} nodes", pi0.pi.len())));
    }
    let degree = h.node_degrees();
    let simplex_degree = h.h.transpose().row_sums();
    let mut pi = pi0.pi.clone();
    for _ in 0..steps / 2 {
        if let Some((node, &mass)) = pi.iter().enumerate().find(|&(v, &m)| degree[v] == 0 && m != 0.0) {
            return Err(Error::MassOnIsolated { node, mass });
        }
        let mut on_simplex = vec![0.0; h.simplex_count()];
        for (u, &mass) in pi.iter().enumerate() {
            let (simplices, weights) = h.h.row(u);
            for (&s, &w) in simplices.iter().zip(weights) {
                on_simplex[s] += w / degree[u] as f64 * mass;
            }
        }
        for (v, slot) in pi.iter_mut().enumerate() {
            let (simplices, weights) = h.h.row(v);
            *slot = simplices
                .iter()
                .zip(weights)
                .fold(0.0, |acc, (&s, &w)| acc + w / simplex_degree[s] * on_simplex[s]);
        }
    }
    Ok(WalkState { order: pi0.order, pi })
}

/// Column-stochastic two-step transition matrix `H_p D_h^{-1} H_pᵀ D_v^{-1}`
/// (columns of isolated nodes are zero).
pub fn walk_matrix(h: &IncidenceMatrix) -> SparseMatrix {
    let degree = h.node_degrees();
    let inv_node: Vec<f64> = degree.iter().map(|&d| if d == 0 { 0.0 } else { 1.0 / d as f64 }).collect();
    let inv_simplex: Vec<f64> = h.h.transpose().row_sums().iter().map(|&d| 1.0 / d).collect();
    let ones_rows = vec![1.0; h.node_count()];
    let left = h.h.scale(&ones_rows, &inv_simplex).expect("diagonal length");
    let right = h.h.transpose().scale(&vec![1.0; h.simplex_count()], &inv_node).expect("diagonal length");
    left.matmul(&right).expect("conformable")
}
