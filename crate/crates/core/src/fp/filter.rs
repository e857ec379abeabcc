use crate::error::{Error, Result};
use crate::sparse::{dense_sym_eig, SparseMatrix, EIG_SIZE_CAP};

/// Spectral-domain filtering `Φ g(Λ) Φᵀ x` with `g(λ) = Σ_k coeffs[k] λ^k`.
///
/// Uses a full dense eigendecomposition, so it is a test oracle for
/// [`polynomial_filter`] and limited to small operators.
pub fn spectral_filter_oracle(l: &SparseMatrix, coeffs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if l.rows() > EIG_SIZE_CAP {
        return Err(Error::TooLarge { size: l.rows(), cap: EIG_SIZE_CAP });
    }
    if x.len() != l.cols() {
        return Err(Error::DimensionMismatch(format!("signal length {} vs operator {}", x.len(), l.cols())));
    }
    let eig = dense_sym_eig(&l.to_dense())?;
    let phi = &eig.eigenvectors;
    let n = phi.rows();
    let response: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| coeffs.iter().rev().fold(0.0, |acc, &c| acc * lam + c))
        .collect();
    // Φᵀ x, scale, Φ (·)
    let spectral: Vec<f64> = (0..n)
        .map(|j| (0..n).fold(0.0, |acc, i| acc + phi.get(i, j) * x[i]) * response[j])
        .collect();
    Ok((0..n).map(|i| (0..n).fold(0.0, |acc, j| acc + phi.get(i, j) * spectral[j])).collect())
}

/// `Σ_k coeffs[k] L^k x` by repeated sparse mat-vecs.
pub fn polynomial_filter(l: &SparseMatrix, coeffs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let mut power = x.to_vec();
    let mut out = vec![0.0; x.len()];
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = l.spmv(&power)?;
        }
        for (o, p) in out.iter_mut().zip(&power) {
            *o += c * p;
        }
    }
    Ok(out)
}
