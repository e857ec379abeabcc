use crate::complex::{incidence_matrix, IncidenceMatrix, SimplicialComplex};
use crate::error::Result;
use crate::sparse::SparseMatrix;

/// Symmetric FP adjacency of one petal order.
#[derive(Debug, Clone, PartialEq)]
pub struct FpOperator {
    pub order: usize,
    /// `Ã_p`, `n × n`.
    pub a_tilde: SparseMatrix,
    /// `d_p(v)`.
    pub node_degrees: Vec<usize>,
    /// Nodes in no order-p simplex; their rows and columns of `Ã_p` are empty.
    pub isolated: Vec<bool>,
}

impl FpOperator {
    pub fn node_count(&self) -> usize {
        self.a_tilde.rows()
    }

    pub fn has_isolated(&self) -> bool {
        self.isolated.iter().any(|&i| i)
    }

    pub fn laplacian(&self) -> SparseMatrix {
        build_fp_laplacian(self)
    }
}

/// `Ã_p = (1/(p+1)) D_v^{-1/2} H_p H_pᵀ D_v^{-1/2}`, with rows and columns of
/// isolated nodes left empty.
pub fn build_fp_adjacency(h: &IncidenceMatrix) -> FpOperator {
    let degrees = h.node_degrees();
    let isolated: Vec<bool> = degrees.iter().map(|&d| d == 0).collect();
    let inv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let co_membership = h.h.matmul(&h.h.transpose()).expect("H Hᵀ is square");
    let weight = 1.0 / (h.order + 1) as f64;
    let left: Vec<f64> = inv_sqrt.iter().map(|s| s * weight).collect();
    let a_tilde = co_membership.scale(&left, &inv_sqrt).expect("diagonals match");
    FpOperator { order: h.order, a_tilde, node_degrees: degrees, isolated }
}

/// `L_p = I − Ã_p` (diagonal 1 on isolated nodes).
pub fn build_fp_laplacian(op: &FpOperator) -> SparseMatrix {
    op.a_tilde.identity_minus().expect("Ã_p is square")
}

/// Operators for every order `1..=max_order` of the complex.
pub fn build_operators(k: &SimplicialComplex, max_order: usize) -> Result<Vec<FpOperator>> {
    (1..=max_order)
        .map(|p| incidence_matrix(k, p).map(|h| build_fp_adjacency(&h)))
        .collect()
}
