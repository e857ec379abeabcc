//! Minimal linear algebra: CSR sparse matrices, row-major dense matrices and
//! a cyclic Jacobi eigensolver for small symmetric matrices.
//!
//! All floating point is `f64`. Every reduction runs in a fixed order
//! (ascending column index for sparse rows), so products are bit-identical
//! regardless of how many threads computed them.

mod csr;
mod dense;
mod eig;

pub use csr::SparseMatrix;
pub use dense::DenseMatrix;
pub use eig::{dense_sym_eig, SymEigen, EIG_SIZE_CAP};
