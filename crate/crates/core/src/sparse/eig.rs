use crate::error::{Error, Result};

use super::DenseMatrix;

/// Largest matrix accepted by [`dense_sym_eig`]; the solver exists for verification only.
pub const EIG_SIZE_CAP: usize = 512;

const SYMMETRY_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = Φ Λ Φᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: DenseMatrix,
}

impl SymEigen {
    /// `Φ diag(values) Φᵀ`.
    pub fn reconstruct_with(&self, values: &[f64]) -> DenseMatrix {
        let phi = &self.eigenvectors;
        let scaled = DenseMatrix::from_fn(phi.rows(), phi.cols(), |r, c| phi.get(r, c) * values[c]);
        scaled.matmul_t(phi).expect("square factors")
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }
}

/// Cyclic Jacobi eigensolver for small dense symmetric matrices.
///
/// Sweeps every off-diagonal pair with a plane rotation until the
/// off-diagonal Frobenius norm drops below `1e-12 · max(1, ‖A‖_F)`.
pub fn dense_sym_eig(a: &DenseMatrix) -> Result<SymEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!("eigensolver needs a square matrix, got {n}x{}", a.cols())));
    }
    if n > EIG_SIZE_CAP {
        return Err(Error::TooLarge { size: n, cap: EIG_SIZE_CAP });
    }
    let scale = a.max_abs().max(1.0);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((a.get(i, j) - a.get(j, i)).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input".into()));
    }

    // symmetrize exactly so rotations stay consistent
    let mut m = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
    let mut v = DenseMatrix::identity(n);
    let frob = m.sum_squares().sqrt();
    let tol = OFF_DIAGONAL_TOL * frob.max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    let eigenvalues = order.iter().map(|&i| m.get(i, i)).collect();
    let eigenvectors = DenseMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(SymEigen { eigenvalues, eigenvectors })
}

fn off_norm(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j) * m.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Applies `Jᵀ M J` and `V J` for the rotation in the (p, q) plane that zeroes `M[p,q]`.
fn rotate(m: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, c * mkp - s * mkq);
        m.set(k, q, s * mkp + c * mkq);
    }
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, c * mpk - s * mqk);
        m.set(q, k, s * mpk + c * mqk);
    }
    m.set(p, q, 0.0);
    m.set(q, p, 0.0);
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let d = DenseMatrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]])
            .unwrap();
        assert_eq!(dense_sym_eig(&d).unwrap().eigenvalues, vec![1.0, 2.0, 3.0]);

        let swap = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = dense_sym_eig(&swap).unwrap().eigenvalues;
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k3_fp_laplacian_order_two() {
        // I - ones/3: rank-one shift of the identity
        let l = DenseMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 - 1.0 / 3.0 } else { -1.0 / 3.0 });
        let e = dense_sym_eig(&l).unwrap().eigenvalues;
        for (got, want) in e.iter().zip([0.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn rejects_asymmetric_and_oversized() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(dense_sym_eig(&m), Err(Error::NotSymmetric(_))));
        let big = DenseMatrix::zeros(EIG_SIZE_CAP + 1, EIG_SIZE_CAP + 1);
        assert!(matches!(dense_sym_eig(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn reconstruction_and_orthonormality_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for case in 0..100 {
            let n = rng.random_range(1..=64);
            let a = random_symmetric(&mut rng, n);
            let eig = dense_sym_eig(&a).unwrap();
            let recon = eig.reconstruct();
            assert!(recon.max_abs_diff(&a) <= 1e-9, "case {case}");
            let gram = eig.eigenvectors.t_matmul(&eig.eigenvectors).unwrap();
            assert!(gram.max_abs_diff(&DenseMatrix::identity(n)) <= 1e-9);
            // residual A Φ - Φ Λ
            let aphi = a.matmul(&eig.eigenvectors).unwrap();
            let phil = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors.get(r, c) * eig.eigenvalues[c]);
            assert!(aphi.max_abs_diff(&phil) <= 1e-9 * a.max_abs().max(f64::MIN_POSITIVE));
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn psd_spectrum_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(1..=32);
            let b = DenseMatrix::from_fn(n, n + 2, |_, _| rng.random_range(-1.0..1.0));
            let psd = b.matmul_t(&b).unwrap();
            let e = dense_sym_eig(&psd).unwrap().eigenvalues;
            assert!(e[0] >= -1e-10, "{}", e[0]);
        }
    }
}
