//! Closed-form random-walk co-occurrence matrices.
//!
//! For an undirected graph with adjacency A, degree matrix D, transition
//! matrix P = D⁻¹A, volume vol = Σ d_u, window T and shift b:
//!
//!   S = Σ_{r=1..T} Pʳ
//!   Q = (vol / (bT)) · S · D⁻¹          (argument of the shifted PMI log)
//!   J = (1/(T·vol)) · Σ_{k=0..T-1} (Pᵀ)ᵏ A   (window co-occurrence joint probability)
//!
//! Q and J are deliberately computed along different routes (S·D⁻¹ versus
//! (Pᵀ)ᵏA accumulation) so that the identity Q = (vol²/b)·D⁻¹·J·D⁻¹ is a
//! genuine cross-check between independent code paths.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sparse::SparseMatrix;

/// Refuse dense n x n allocations above this many nodes unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    /// Window size T: co-occurrence horizon, number of walk powers summed.
    pub window: usize,
    /// Shift b: the negative-sample count subtracted from PMI as log b.
    pub shift: f64,
    /// Embedding dimension d for the factorization stage.
    pub rank: usize,
}

impl HyperParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidParam("window must be at least 1".into()));
        }
        if !(self.shift > 0.0) || !self.shift.is_finite() {
            return Err(Error::InvalidParam(format!(
                "shift must be a positive finite number, got {}",
                self.shift
            )));
        }
        if self.rank < 1 || self.rank > n {
            return Err(Error::InvalidParam(format!(
                "rank must be in 1..={n}, got {}",
                self.rank
            )));
        }
        Ok(())
    }
}

/// Summation range for the J matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JIndex {
    /// Σ_{k=0..T-1} (Pᵀ)ᵏA. The only variant whose entries sum to 1 with
    /// row sums d_w/vol; used everywhere unless explicitly overridden.
    Canonical,
    /// Σ_{r=1..T-1} (Pʳ)ᵀA, the off-by-one summation that appears in some
    /// published derivations; drops the k=0 term (empty for T=1). Kept for
    /// comparison.
    PaperLiteral,
}

impl JIndex {
    pub fn token(self) -> &'static str {
        match self {
            JIndex::Canonical => "canonical",
            JIndex::PaperLiteral => "paper-literal",
        }
    }

    pub fn from_token(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(JIndex::Canonical),
            "paper-literal" => Ok(JIndex::PaperLiteral),
            _ => Err(Error::InvalidParam(format!(
                "unknown j-index '{s}'; valid values: canonical, paper-literal"
            ))),
        }
    }
}

pub fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::DenseCapExceeded {
            rows: n,
            cols: n,
            bytes: (n as u64) * (n as u64) * 8,
            cap,
        })
    } else {
        Ok(())
    }
}

/// S = Σ_{r=1..T} Pʳ by iterated sparse-times-dense products; Pʳ is never
/// formed by dense-dense powering.
pub fn power_sum(p: &SparseMatrix, window: usize, cap: usize) -> Result<DenseMatrix> {
    if p.n_rows() != p.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "power_sum needs a square matrix, got {}x{}",
            p.n_rows(),
            p.n_cols()
        )));
    }
    if window < 1 {
        return Err(Error::InvalidParam("window must be at least 1".into()));
    }
    check_dense_cap(p.n_rows(), cap)?;
    let mut term = p.to_dense();
    let mut sum = term.clone();
    for _ in 1..window {
        term = p.spmm_dense(&term);
        sum.add_assign(&term);
    }
    Ok(sum)
}

/// Q = (vol/(bT)) · S · D⁻¹; columns of zero-degree nodes are zero.
pub fn q_matrix(g: &Graph, h: &HyperParams, cap: usize) -> Result<DenseMatrix> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut s = power_sum(&g.transition(), h.window, cap)?;
    let scale = g.volume() as f64 / (h.shift * h.window as f64);
    let col_scale: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { scale / d as f64 })
        .collect();
    for i in 0..s.n_rows() {
        for (v, &c) in s.row_mut(i).iter_mut().zip(&col_scale) {
            *v *= c;
        }
    }
    Ok(s)
}

/// J = (1/(T·vol)) · Σ (Pᵀ)ᵏ A with the summation range picked by `variant`.
pub fn j_matrix(g: &Graph, h: &HyperParams, variant: JIndex, cap: usize) -> Result<DenseMatrix> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    check_dense_cap(g.n(), cap)?;
    let a = g.adjacency().to_dense();
    let pt = g.transition().transpose();
    let mut acc = match variant {
        JIndex::Canonical => a.clone(),
        JIndex::PaperLiteral => DenseMatrix::zeros(g.n(), g.n()),
    };
    let mut term = a;
    for _ in 1..h.window {
        term = pt.spmm_dense(&term);
        acc.add_assign(&term);
    }
    acc.scale(1.0 / (h.window as f64 * g.volume() as f64));
    Ok(acc)
}

/// The cross-route identity Q = (vol²/b) · D⁻¹ · J · D⁻¹, using canonical J.
/// Requires every degree positive.
pub fn q_via_j(g: &Graph, h: &HyperParams, cap: usize) -> Result<DenseMatrix> {
    if let Some(u) = g.degrees().iter().position(|&d| d == 0) {
        return Err(Error::ZeroDegree(u as u32));
    }
    let mut j = j_matrix(g, h, JIndex::Canonical, cap)?;
    let scale = (g.volume() as f64) * (g.volume() as f64) / h.shift;
    let inv_deg: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / d as f64).collect();
    for i in 0..j.n_rows() {
        let ri = scale * inv_deg[i];
        for (v, &cj) in j.row_mut(i).iter_mut().zip(&inv_deg) {
            *v *= ri * cj;
        }
    }
    Ok(j)
}
