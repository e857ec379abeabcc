use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

use super::SimplicialComplex;

/// Node-by-simplex 0/1 incidence matrix `H_p` of shape `n × n_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    pub order: usize,
    pub h: SparseMatrix,
}

impl IncidenceMatrix {
    /// `d_p(v)`: number of order-p simplices containing each node.
    pub fn node_degrees(&self) -> Vec<usize> {
        (0..self.h.rows()).map(|r| self.h.row(r).0.len()).collect()
    }

    pub fn node_count(&self) -> usize {
        self.h.rows()
    }

    pub fn simplex_count(&self) -> usize {
        self.h.cols()
    }
}

/// Builds `H_p` with columns in the complex's lexicographic simplex order.
pub fn incidence_matrix(k: &SimplicialComplex, p: usize) -> Result<IncidenceMatrix> {
    if p == 0 || p > k.max_order() {
        return Err(Error::InvalidArgument(format!(
            "order {p} outside 1..={} for this complex",
            k.max_order()
        )));
    }
    let n = k.node_count();
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, s) in k.simplices(p).enumerate() {
        for &v in s {
            member_of[v].push(j);
        }
    }
    let mut row_starts = Vec::with_capacity(n + 1);
    row_starts.push(0);
    let mut cols = Vec::with_capacity((p + 1) * k.count(p));
    for list in member_of {
        // simplices were visited in index order, so each list is already ascending
        cols.extend(list);
        row_starts.push(cols.len());
    }
    let values = vec![1.0; cols.len()];
    let h = SparseMatrix::try_new(n, k.count(p), row_starts, cols, values)?;
    Ok(IncidenceMatrix { order: p, h })
}
