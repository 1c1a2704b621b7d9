//! Truncated SVD via a seeded randomized range finder, and the embedding
//! map Y = U_d sqrt(Sigma_d).
//!
//! Pipeline: Gaussian sample Y0 = M*Omega, `power_iters` rounds of
//! Y <- M*(M^T*orth(Y)), basis B = orth(Y), then an exact one-sided Jacobi
//! SVD of the small projection B^T*M, truncated to rank d. Every step is
//! sequential or uses disjoint-row parallel products, so the result is a
//! pure function of (matrix, d, oversample, power_iters, seed).

use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const DEFAULT_OVERSAMPLE: usize = 10;
pub const DEFAULT_POWER_ITERS: usize = 7;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    /// Left singular vectors, n_rows x d, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// Right singular vectors, n_cols x d. Columns of exactly zero singular
    /// values are zero.
    pub v: DenseMatrix,
}

pub fn truncated_svd(
    m: &DenseMatrix,
    d: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<EmbeddingSet> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    if d < 1 || d > rows.min(cols) {
        return Err(Error::InvalidParam(format!(
            "rank {d} out of range for a {rows}x{cols} matrix"
        )));
    }
    if let Some((i, j)) = m.first_non_finite() {
        return Err(Error::NonFinite(i, j));
    }

    let l = (d + oversample).min(rows).min(cols);

    let mut rng = rng_from_seed(seed);
    let mut omega = DenseMatrix::zeros(cols, l);
    for v in omega.data_mut() {
        *v = rng.sample(StandardNormal);
    }

    let mut y = m.matmul(&omega);
    for _ in 0..power_iters {
        let mut y_cols = to_columns(&y);
        orthonormalize_columns(&mut y_cols);
        let z = m.matmul_at_b(&from_columns(rows, &y_cols));
        y = m.matmul(&z);
    }
    let mut b_cols = to_columns(&y);
    orthonormalize_columns(&mut b_cols);
    let b = from_columns(rows, &b_cols);

    // Small projection C = B^T M (l x cols); Jacobi works on G = C^T.
    let c = b.matmul_at_b(m);
    let mut g = to_columns(&c.transpose());
    let mut rot = identity_columns(l);
    jacobi_orthogonalize(&mut g, &mut rot);

    let mut order: Vec<usize> = (0..l).collect();
    let norms: Vec<f64> = g.iter().map(|col| norm(col)).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut u = DenseMatrix::zeros(rows, d);
    let mut v = DenseMatrix::zeros(cols, d);
    let mut singular_values = Vec::with_capacity(d);
    for (k, &src) in order.iter().take(d).enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        // Left vector: B * (rotation column), length rows.
        let mut u_col = vec![0.0; rows];
        for (j, &w) in rot[src].iter().enumerate() {
            if w != 0.0 {
                for (out, &bij) in u_col.iter_mut().zip(&b_cols[j]) {
                    *out += w * bij;
                }
            }
        }
        let mut v_col = vec![0.0; cols];
        if sigma > 0.0 {
            for (out, &gi) in v_col.iter_mut().zip(&g[src]) {
                *out = gi / sigma;
            }
        }
        // Sign convention: make the largest-magnitude entry of the left
        // vector positive; first occurrence wins on exact ties.
        let mut best = 0;
        for (i, &x) in u_col.iter().enumerate() {
            if x.abs() > u_col[best].abs() {
                best = i;
            }
        }
        if u_col[best] < 0.0 {
            for x in &mut u_col {
                *x = -*x;
            }
            for x in &mut v_col {
                *x = -*x;
            }
        }
        for i in 0..rows {
            u.set(i, k, u_col[i]);
        }
        for i in 0..cols {
            v.set(i, k, v_col[i]);
        }
    }

    Ok(EmbeddingSet {
        u,
        singular_values,
        v,
    })
}

/// Y[i,k] = U[i,k] * sqrt(sigma_k).
pub fn embed(s: &EmbeddingSet) -> DenseMatrix {
    let d = s.singular_values.len();
    assert!(
        s.singular_values.iter().all(|&x| x >= 0.0),
        "negative singular value"
    );
    let roots: Vec<f64> = s.singular_values.iter().map(|&x| x.sqrt()).collect();
    let mut y = s.u.clone();
    for i in 0..y.n_rows() {
        let row = y.row_mut(i);
        for k in 0..d {
            row[k] *= roots[k];
        }
    }
    y
}

/// Y * Y^T, symmetric by construction.
pub fn reconstruct(y: &DenseMatrix) -> DenseMatrix {
    y.matmul(&y.transpose())
}

/// CSV export with header "node,y0..y{d-1}".
pub fn write_embedding_csv(y: &DenseMatrix, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write!(w, "node")?;
        for k in 0..y.n_cols() {
            write!(w, ",y{k}")?;
        }
        writeln!(w)?;
        for i in 0..y.n_rows() {
            write!(w, "{i}")?;
            for &x in y.row(i) {
                write!(w, ",{x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

fn to_columns(m: &DenseMatrix) -> Vec<Vec<f64>> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut out = vec![vec![0.0; rows]; cols];
    for i in 0..rows {
        let row = m.row(i);
        for (j, col) in out.iter_mut().enumerate() {
            col[i] = row[j];
        }
    }
    out
}

fn from_columns(rows: usize, cols: &[Vec<f64>]) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rows, cols.len());
    for i in 0..rows {
        let row = out.row_mut(i);
        for (j, col) in cols.iter().enumerate() {
            row[j] = col[i];
        }
    }
    out
}

fn identity_columns(l: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; l]; l];
    for (j, col) in out.iter_mut().enumerate() {
        col[j] = 1.0;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Modified Gram-Schmidt with a second projection pass. A column that
/// vanishes (rank deficiency) is replaced by the canonical basis vector
/// with the largest component outside the span built so far, keeping the
/// output deterministic and fully orthonormal.
fn orthonormalize_columns(cols: &mut [Vec<f64>]) {
    let n = if cols.is_empty() { 0 } else { cols[0].len() };
    assert!(cols.len() <= n, "more columns than dimensions");
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let r = dot(q, col);
                for (c, &qi) in col.iter_mut().zip(q) {
                    *c -= r * qi;
                }
            }
        }
        let nrm = norm(col);
        if nrm > 1e-12 {
            for c in col.iter_mut() {
                *c /= nrm;
            }
            continue;
        }
        // Deterministic fallback: best canonical basis vector.
        let mut best_k = 0;
        let mut best_nrm = -1.0;
        let mut best: Vec<f64> = Vec::new();
        for k in 0..n {
            let mut cand = vec![0.0; n];
            cand[k] = 1.0;
            for _ in 0..2 {
                for q in done.iter() {
                    let r = dot(q, &cand);
                    for (c, &qi) in cand.iter_mut().zip(q) {
                        *c -= r * qi;
                    }
                }
            }
            let nrm = norm(&cand);
            if nrm > best_nrm {
                best_nrm = nrm;
                best_k = k;
                best = cand;
            }
        }
        debug_assert!(best_nrm > 0.0, "no basis vector outside span (k={best_k})");
        for c in best.iter_mut() {
            *c /= best_nrm;
        }
        *col = best;
    }
}

/// One-sided Jacobi: plane rotations until all column pairs of `g` are
/// orthogonal; the same rotations accumulate into `rot`.
fn jacobi_orthogonalize(g: &mut [Vec<f64>], rot: &mut [Vec<f64>]) {
    let l = g.len();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..l {
            for q in (p + 1)..l {
                let (gp, gq) = pair_mut(g, p, q);
                let app = dot(gp, gp);
                let aqq = dot(gq, gq);
                let apq = dot(gp, gq);
                if apq.abs() <= JACOBI_TOL * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(gp, gq, c, s);
                let (rp, rq) = pair_mut(rot, p, q);
                rotate(rp, rq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn pair_mut<T>(v: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let new_x = c * *xi - s * *yi;
        let new_y = s * *xi + c * *yi;
        *xi = new_x;
        *yi = new_y;
    }
}
