//! Row-major dense f64 matrix with the few kernels the toolkit needs,
//! plus CSV and GFMX1 binary export.
//!
//! Parallel kernels write disjoint output rows and accumulate in a fixed
//! order within each row, so results are bitwise reproducible regardless
//! of thread count.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const GFMX_MAGIC: &[u8; 5] = b"GFMX1";

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_rows * n_cols, "data length must be rows*cols");
        DenseMatrix {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// C = self * other.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.n_cols, other.n_rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.n_rows, self.n_cols, other.n_rows, other.n_cols
        );
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        let w = other.n_cols;
        out.data
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(i, out_row)| {
                let a_row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
                for (k, &a) in a_row.iter().enumerate() {
                    if a != 0.0 {
                        let b_row = &other.data[k * w..(k + 1) * w];
                        for (o, &b) in out_row.iter_mut().zip(b_row) {
                            *o += a * b;
                        }
                    }
                }
            });
        out
    }

    /// C = selfᵀ * other, via an explicit transpose for cache-friendly rows.
    pub fn matmul_at_b(&self, other: &DenseMatrix) -> DenseMatrix {
        self.transpose().matmul(other)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.data[j * self.n_rows + i] = self.data[i * self.n_cols + j];
            }
        }
        out
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn add_assign(&mut self, other: &DenseMatrix) {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        DenseMatrix::from_vec(self.n_rows, self.n_cols, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> DenseMatrix {
        let mut out = self.clone();
        out.map_in_place(f);
        out
    }

    pub fn map_in_place(&mut self, f: impl Fn(f64) -> f64 + Sync) {
        let w = self.n_cols.max(1);
        self.data.par_chunks_mut(w).for_each(|row| {
            for v in row {
                *v = f(*v);
            }
        });
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|&v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.n_cols, p % self.n_cols))
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_csv_to(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn write_csv_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        for i in 0..self.n_rows {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{}", v)?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn read_csv(path: &Path) -> Result<DenseMatrix> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut data = Vec::new();
        let mut n_cols = None;
        let mut n_rows = 0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let mut row_len = 0;
            for tok in line.split(',') {
                let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("not a number: '{tok}'"),
                })?;
                data.push(v);
                row_len += 1;
            }
            match n_cols {
                None => n_cols = Some(row_len),
                Some(c) if c != row_len => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        msg: format!("expected {c} columns, found {row_len}"),
                    })
                }
                _ => {}
            }
            n_rows += 1;
        }
        let n_cols = n_cols.unwrap_or(0);
        Ok(DenseMatrix::from_vec(n_rows, n_cols, data))
    }

    /// Binary export: magic "GFMX1", u64 rows, u64 cols, row-major f64, all little-endian.
    pub fn write_gfmx(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            w.write_all(GFMX_MAGIC)?;
            w.write_all(&(self.n_rows as u64).to_le_bytes())?;
            w.write_all(&(self.n_cols as u64).to_le_bytes())?;
            for &v in &self.data {
                w.write_all(&v.to_le_bytes())?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }

    pub fn read_gfmx(path: &Path) -> Result<DenseMatrix> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: msg.to_string(),
        };
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
        if &magic != GFMX_MAGIC {
            return Err(bad("bad magic, not a GFMX1 file"));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8).map_err(|e| Error::io(path, e))?;
        let n_rows = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8).map_err(|e| Error::io(path, e))?;
        let n_cols = u64::from_le_bytes(b8) as usize;
        let total = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| bad("dimension overflow"))?;
        let mut data = Vec::with_capacity(total);
        for _ in 0..total {
            r.read_exact(&mut b8).map_err(|e| Error::io(path, e))?;
            data.push(f64::from_le_bytes(b8));
        }
        Ok(DenseMatrix::from_vec(n_rows, n_cols, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = DenseMatrix::from_vec(2, 2, vec![5.0, 6.0, 7.0, 8.0]);
        let c = a.matmul(&b);
        assert_eq!(c.data(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn matmul_at_b_matches_manual_transpose() {
        let a = DenseMatrix::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = DenseMatrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let c = a.matmul_at_b(&b);
        assert_eq!(c.n_rows(), 2);
        assert_eq!(c.n_cols(), 2);
        assert_eq!(c.get(0, 0), 1.0 + 0.0 + 5.0);
        assert_eq!(c.get(1, 1), 0.0 + 4.0 + 6.0);
    }

    #[test]
    fn transpose_roundtrip() {
        let a = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn gfmx_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.gfmx");
        let a = DenseMatrix::from_vec(2, 3, vec![1.5, -2.25, 0.0, f64::MIN_POSITIVE, 1e300, -0.5]);
        a.write_gfmx(&path).unwrap();
        let b = DenseMatrix::read_gfmx(&path).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_roundtrip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let a = DenseMatrix::from_vec(2, 2, vec![0.1, 1.0 / 3.0, -7.25, 1e-300]);
        a.write_csv(&path).unwrap();
        let b = DenseMatrix::read_csv(&path).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn min_max_and_norms() {
        let a = DenseMatrix::from_vec(1, 3, vec![3.0, -4.0, 0.0]);
        assert_eq!(a.min_max(), (-4.0, 3.0));
        assert_eq!(a.frobenius_norm(), 5.0);
    }
}
