//! Compressed sparse row matrix; storage for adjacency and transition
//! matrices and the sparse-times-dense kernel behind all the power sums.

use rayon::prelude::*;

use crate::dense::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row entry lists. Entries must be sorted by column
    /// within each row, without duplicates; zero values are dropped.
    pub fn from_rows(n_rows: usize, n_cols: usize, rows: &[Vec<(u32, f64)>]) -> Self {
        assert_eq!(rows.len(), n_rows);
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            let mut prev: Option<u32> = None;
            for &(c, v) in row {
                assert!((c as usize) < n_cols, "column {c} out of range");
                if let Some(p) = prev {
                    assert!(c > p, "columns must be strictly increasing within a row");
                }
                prev = Some(c);
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_entries(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// C = self * b (sparse times dense).
    pub fn spmm_dense(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.n_cols,
            b.n_rows(),
            "spmm dimension mismatch: {}x{} * {}x{}",
            self.n_rows,
            self.n_cols,
            b.n_rows(),
            b.n_cols()
        );
        let w = b.n_cols();
        let mut out = DenseMatrix::zeros(self.n_rows, w);
        out.data_mut()
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(i, out_row)| {
                let (cols, vals) = self.row_entries(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    let b_row = b.row(c as usize);
                    for (o, &x) in out_row.iter_mut().zip(b_row) {
                        *o += v * x;
                    }
                }
            });
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols];
        for &c in &self.col_idx {
            counts[c as usize] += 1;
        }
        let mut row_ptr = Vec::with_capacity(self.n_cols + 1);
        row_ptr.push(0usize);
        for &c in &counts {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        let mut cursor = row_ptr[..self.n_cols].to_vec();
        let mut col_idx = vec![0u32; self.values.len()];
        let mut values = vec![0.0f64; self.values.len()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row_entries(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let pos = cursor[c as usize];
                col_idx[pos] = i as u32;
                values[pos] = v;
                cursor[c as usize] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row_entries(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.set(i, c as usize, v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> SparseMatrix {
        // [[0, 2, 0], [1, 0, 3]]
        SparseMatrix::from_rows(2, 3, &[vec![(1, 2.0)], vec![(0, 1.0), (2, 3.0)]])
    }

    #[test]
    fn spmm_matches_dense() {
        let s = example();
        let b = DenseMatrix::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let c = s.spmm_dense(&b);
        let expect = s.to_dense().matmul(&b);
        assert_eq!(c, expect);
    }

    #[test]
    fn transpose_roundtrip() {
        let s = example();
        assert_eq!(s.transpose().transpose(), s);
        assert_eq!(s.transpose().to_dense(), s.to_dense().transpose());
    }

    #[test]
    fn zeros_are_dropped() {
        let s = SparseMatrix::from_rows(1, 3, &[vec![(0, 0.0), (2, 1.0)]]);
        assert_eq!(s.nnz(), 1);
    }
}
