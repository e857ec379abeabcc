use crate::error::{Error, Result};
use crate::par;

use super::DenseMatrix;

/// Compressed sparse row matrix of `f64`.
///
/// Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_starts: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, validating every structural invariant.
    pub fn try_new(
        rows: usize,
        cols: usize,
        row_starts: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_starts.len() != rows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_starts has length {}, expected {}",
                row_starts.len(),
                rows + 1
            )));
        }
        if row_starts[0] != 0 {
            return Err(Error::InvalidStructure("row_starts[0] != 0".into()));
        }
        if col_indices.len() != values.len() || row_starts[rows] != values.len() {
            return Err(Error::InvalidStructure(format!(
                "row_starts[rows] = {}, {} column indices, {} values",
                row_starts[rows],
                col_indices.len(),
                values.len()
            )));
        }
        for r in 0..rows {
            let (s, e) = (row_starts[r], row_starts[r + 1]);
            if s > e {
                return Err(Error::InvalidStructure(format!("row_starts decreases at row {r}")));
            }
            let row = &col_indices[s..e];
            if let Some(&c) = row.iter().find(|&&c| c >= cols) {
                return Err(Error::InvalidStructure(format!("column {c} out of range in row {r}")));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "columns of row {r} are not strictly increasing"
                )));
            }
        }
        Ok(Self { rows, cols, row_starts, col_indices, values })
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions are summed
    /// in input order; explicit zeros are kept.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            per_row[r].push((c, v));
        }
        let mut row_starts = Vec::with_capacity(rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_starts.push(0);
        for mut entries in per_row {
            // stable sort keeps input order among duplicates
            entries.sort_by_key(|&(c, _)| c);
            for (c, v) in entries {
                if col_indices.len() > *row_starts.last().unwrap() && col_indices.last() == Some(&c)
                {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_starts.push(col_indices.len());
        }
        Ok(Self { rows, cols, row_starts, col_indices, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_starts: vec![0; rows + 1], col_indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_starts: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Keeps entries with `|v| > tol`.
    pub fn from_dense(m: &DenseMatrix, tol: f64) -> Self {
        let trip = (0..m.rows())
            .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = m.get(r, c);
                (v.abs() > tol).then_some((r, c, v))
            });
        Self::from_triplets(m.rows(), m.cols(), trip).expect("indices in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_starts(&self) -> &[usize] {
        &self.row_starts
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_starts[r], self.row_starts[r + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(i) => vals[i],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "spmv: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).fold(0.0, |acc, (&c, &v)| acc + v * x[c])
            })
            .collect())
    }

    /// `self · x` for a dense right-hand side. Rows of the output are computed
    /// independently; each entry sums in ascending column order.
    pub fn spmm_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.rows() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "spmm: matrix has {} columns, right-hand side has {} rows",
                self.cols,
                x.rows()
            )));
        }
        let d = x.cols();
        let mut out = vec![0.0; self.rows * d];
        par::for_each_chunk_mut(&mut out, d, |r, dst| {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let src = x.row(c);
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        });
        DenseMatrix::from_vec(self.rows, d, out)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.cols {
            counts[i + 1] += counts[i];
        }
        let row_starts = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self { rows: self.cols, cols: self.rows, row_starts, col_indices, values }
    }

    /// Sparse-sparse product (row-wise Gustavson with a dense accumulator).
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = vec![0.0; other.cols];
        let mut touched = vec![false; other.cols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_starts = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            let (acols, avals) = self.row(r);
            for (&k, &a) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&c, &b) in bcols.iter().zip(bvals) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                col_indices.push(c);
                values.push(acc[c]);
                acc[c] = 0.0;
                touched[c] = false;
            }
            pattern.clear();
            row_starts.push(col_indices.len());
        }
        Ok(Self { rows: self.rows, cols: other.cols, row_starts, col_indices, values })
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale(&self, left: &[f64], right: &[f64]) -> Result<Self> {
        if left.len() != self.rows || right.len() != self.cols {
            return Err(Error::DimensionMismatch("scale: diagonal length".into()));
        }
        let mut out = self.clone();
        for r in 0..self.rows {
            let (s, e) = (self.row_starts[r], self.row_starts[r + 1]);
            for i in s..e {
                out.values[i] = left[r] * self.values[i] * right[self.col_indices[i]];
            }
        }
        Ok(out)
    }

    /// `I - self` for a square matrix.
    pub fn identity_minus(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("identity_minus on non-square matrix".into()));
        }
        let trip = (0..self.rows).map(|r| (r, r, 1.0)).chain((0..self.rows).flat_map(|r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, -v))
        }));
        Self::from_triplets(self.rows, self.cols, trip)
    }

    /// Largest `|A[i,j] - A[j,i]|`; infinite for non-square matrices.
    pub fn max_asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m.set(r, c, v);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3_adjacency() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            [(0, 1, 1.0), (0, 2, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 1, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn spmv_identity_zero_and_degrees() {
        assert_eq!(SparseMatrix::identity(3).spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(SparseMatrix::zeros(2, 2).spmv(&[5.0, 7.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(k3_adjacency().spmv(&[1.0; 3]).unwrap(), vec![2.0; 3]);
    }

    #[test]
    fn spmv_rejects_wrong_length() {
        assert!(matches!(
            SparseMatrix::identity(3).spmv(&[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spmm_identity_and_column_consistency() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(SparseMatrix::identity(2).spmm_dense(&x).unwrap(), x);

        let a = k3_adjacency();
        let col = DenseMatrix::from_vec(3, 1, vec![0.5, -1.0, 2.0]).unwrap();
        let via_spmm = a.spmm_dense(&col).unwrap();
        let via_spmv = a.spmv(&[0.5, -1.0, 2.0]).unwrap();
        assert_eq!(via_spmm.as_slice(), via_spmv.as_slice());
        assert!(a.spmm_dense(&DenseMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = SparseMatrix::from_triplets(2, 3, [(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5)]).unwrap();
        assert_eq!(m.row(0).0, &[0, 2]);
        assert_eq!(m.get(0, 2), 1.5);
        assert_eq!(m.row(1).0.len(), 0);
    }

    #[test]
    fn try_new_validates() {
        assert!(SparseMatrix::try_new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::try_new(1, 2, vec![0, 2], vec![0, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::try_new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(SparseMatrix::try_new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(SparseMatrix::try_new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn matmul_transpose_and_identity_minus() {
        let h = SparseMatrix::from_triplets(3, 2, [(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0)])
            .unwrap();
        let hht = h.matmul(&h.transpose()).unwrap();
        let expect = [[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 1.0]];
        for (r, row) in expect.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(hht.get(r, c), v);
            }
        }
        assert_eq!(hht.max_asymmetry(), 0.0);
        let l = hht.identity_minus().unwrap();
        assert_eq!(l.get(1, 1), -1.0);
        assert_eq!(l.get(0, 2), 0.0);
    }
}
