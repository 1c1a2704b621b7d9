//! Shared helpers for the integration suites: graph generators and
//! independent oracles (exact eigenvalues, brute-force AUC) that do not
//! reuse the library's own numerical kernels.
#![allow(dead_code)] // each test binary compiles its own copy

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use graphfactor::dense::DenseMatrix;
use graphfactor::graph::Graph;
use graphfactor::rng::rng_from_seed;
use graphfactor::svd::EmbeddingSet;

pub fn karate_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.txt")
}

pub fn k3() -> Graph {
    Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
}

/// Random connected graph: a random attachment tree plus `extra` distinct
/// non-tree edges. Every node has degree >= 1.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> Graph {
    assert!(n >= 2);
    let mut rng = rng_from_seed(seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n - 1 + extra);
    for v in 1..n as u32 {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    let mut have: std::collections::HashSet<(u32, u32)> = edges.iter().copied().collect();
    let max_extra = n * (n - 1) / 2 - (n - 1);
    let mut remaining = extra.min(max_extra);
    while remaining > 0 {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if have.insert(e) {
            edges.push(e);
            remaining -= 1;
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn random_dense(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations.
/// Deliberately a different algorithm family from the library's one-sided
/// SVD so it can serve as an independent oracle.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.n_rows();
    assert_eq!(n, m.n_cols());
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let frob: f64 = m.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-13 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Sum of the smallest (n - d) eigenvalues of M^T M: the squared Frobenius
/// error of the optimal rank-d approximation.
pub fn exact_tail_energy(m: &DenseMatrix, d: usize) -> f64 {
    let gram = m.matmul_at_b(m);
    let mut eig = symmetric_eigenvalues(&gram);
    eig.sort_by(|a, b| b.total_cmp(a));
    eig.iter().skip(d).map(|&v| v.max(0.0)).sum()
}

/// Rebuilds U * diag(sigma) * V^T from a factorization.
pub fn low_rank_product(svd: &EmbeddingSet) -> DenseMatrix {
    let mut scaled = svd.u.clone();
    for i in 0..scaled.n_rows() {
        for (k, v) in scaled.row_mut(i).iter_mut().enumerate() {
            *v *= svd.singular_values[k];
        }
    }
    scaled.matmul(&svd.v.transpose())
}

/// O(|pos| * |neg|) pairwise AUC with the half-credit tie convention.
pub fn brute_force_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut total = 0.0;
    for &p in pos {
        for &q in neg {
            total += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    total / (pos.len() as f64 * neg.len() as f64)
}

/// Sample variance (ddof = 1) of a slice.
pub fn variance(values: &[f64]) -> f64 {
    assert!(values.len() >= 2);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}
