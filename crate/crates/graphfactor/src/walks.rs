//! Monte-Carlo ground truth: simulate uniform random walks, count window
//! co-occurrences, and estimate the empirical joint, marginal, and PMI
//! statistics the closed forms must converge to.

use std::collections::HashMap;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrices::{j_matrix, q_matrix, HyperParams, JIndex};
use crate::rng::{derive, fnv1a64, rng_from_seed};

/// Oracle-only defaults; the closed forms have no walk-length knob.
pub const DEFAULT_WALKS_PER_NODE: usize = 80;
pub const DEFAULT_WALK_LENGTH: usize = 40;

#[derive(Debug, Clone)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<u32>>,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CooccurrenceCounts {
    pub n: usize,
    pub window: usize,
    /// #(w,c) for observed ordered pairs.
    pairs: HashMap<(u32, u32), u64>,
    /// |Omega|.
    pub total: u64,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
}

/// L walks from every node. Each walk draws from its own generator seeded
/// by (seed, node, walk index), so the corpus is independent of thread
/// scheduling, and a larger L extends a smaller one instead of reshuffling.
pub fn simulate_walks(
    g: &Graph,
    walks_per_node: usize,
    walk_length: usize,
    seed: u64,
) -> Result<WalkCorpus> {
    if walks_per_node < 1 {
        return Err(Error::InvalidParam("walks_per_node must be >= 1".into()));
    }
    if walk_length < 2 {
        return Err(Error::InvalidParam("walk_length must be >= 2".into()));
    }
    let walks: Vec<Vec<u32>> = (0..g.n() as u32)
        .into_par_iter()
        .flat_map_iter(|node| {
            (0..walks_per_node).map(move |i| {
                let mut rng = rng_from_seed(derive(seed, &[node as u64, i as u64]));
                let mut walk = Vec::with_capacity(walk_length);
                let mut cur = node;
                walk.push(cur);
                for _ in 1..walk_length {
                    let neigh = g.neighbors(cur);
                    if neigh.is_empty() {
                        break;
                    }
                    cur = neigh[rng.gen_range(0..neigh.len())];
                    walk.push(cur);
                }
                walk
            })
        })
        .collect();
    Ok(WalkCorpus {
        walks,
        walks_per_node,
        walk_length,
        seed,
    })
}

impl WalkCorpus {
    /// One walk per line, space-separated node ids.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            for walk in &self.walks {
                let mut first = true;
                for id in walk {
                    if !first {
                        w.write_all(b" ")?;
                    }
                    write!(w, "{id}")?;
                    first = false;
                }
                w.write_all(b"\n")?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }
}

/// Harvest ordered pairs (w_i, w_{i+r}) and (w_i, w_{i-r}) for offsets
/// r = 1..window; pairs that would cross a walk boundary are omitted.
pub fn count_cooccurrences(corpus: &WalkCorpus, n: usize, window: usize) -> CooccurrenceCounts {
    let mut counts = CooccurrenceCounts {
        n,
        window,
        pairs: HashMap::new(),
        total: 0,
        row_marginals: vec![0; n],
        col_marginals: vec![0; n],
    };
    for walk in &corpus.walks {
        for i in 0..walk.len() {
            for r in 1..=window {
                if i + r >= walk.len() {
                    break;
                }
                counts.add(walk[i], walk[i + r]);
                counts.add(walk[i + r], walk[i]);
            }
        }
    }
    counts
}

impl CooccurrenceCounts {
    fn add(&mut self, w: u32, c: u32) {
        *self.pairs.entry((w, c)).or_insert(0) += 1;
        self.row_marginals[w as usize] += 1;
        self.col_marginals[c as usize] += 1;
        self.total += 1;
    }

    pub fn pair_count(&self, w: u32, c: u32) -> u64 {
        self.pairs.get(&(w, c)).copied().unwrap_or(0)
    }

    pub fn observed_pairs(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.pairs.iter().map(|(&(w, c), &k)| (w, c, k))
    }

    /// #(w): total occurrences of w in word position.
    pub fn word_marginal(&self, w: u32) -> u64 {
        self.row_marginals[w as usize]
    }

    pub fn context_marginal(&self, c: u32) -> u64 {
        self.col_marginals[c as usize]
    }
}

/// J_hat[w,c] = #(w,c) / |Omega|.
pub fn empirical_joint(counts: &CooccurrenceCounts) -> Result<DenseMatrix> {
    if counts.total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut m = DenseMatrix::zeros(counts.n, counts.n);
    let total = counts.total as f64;
    for (w, c, k) in counts.observed_pairs() {
        m.set(w as usize, c as usize, k as f64 / total);
    }
    Ok(m)
}

/// Shifted PMI: log(#(w,c)|Omega| / (#(w)#(c))) - log(shift) on observed
/// pairs; unobserved pairs carry a -inf sentinel that must never reach
/// arithmetic (exports clamp it for display).
pub fn empirical_pmi(counts: &CooccurrenceCounts, shift: f64) -> Result<DenseMatrix> {
    if counts.total == 0 {
        return Err(Error::EmptyCorpus);
    }
    if !(shift > 0.0) {
        return Err(Error::InvalidParam("shift must be positive".into()));
    }
    let mut m = DenseMatrix::zeros(counts.n, counts.n);
    m.map_in_place(|_| f64::NEG_INFINITY);
    let total = counts.total as f64;
    let log_shift = shift.ln();
    for (w, c, k) in counts.observed_pairs() {
        let mw = counts.word_marginal(w) as f64;
        let mc = counts.context_marginal(c) as f64;
        let val = ((k as f64 * total) / (mw * mc)).ln() - log_shift;
        m.set(w as usize, c as usize, val);
    }
    Ok(m)
}

/// Replace -inf sentinels with (min finite - 1); returns the clamp value.
/// For display and export only.
pub fn clamp_neg_inf(m: &DenseMatrix) -> (DenseMatrix, f64) {
    let min_finite = m
        .data()
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let clamp = if min_finite.is_finite() {
        min_finite - 1.0
    } else {
        -1.0
    };
    (
        m.map(|v| if v == f64::NEG_INFINITY { clamp } else { v }),
        clamp,
    )
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub walks_per_node: usize,
    /// ||J_hat - J||_F / ||J||_F against the canonical closed form.
    pub joint_rel_error: f64,
    /// max_w |#(w)/|Omega| - d_w/vol|.
    pub marginal_max_abs_dev: f64,
    /// max relative deviation of exp(PMI + log shift) from closed-form Q
    /// over observed pairs.
    pub pmi_vs_q_max_rel_dev: f64,
}

/// The Monte-Carlo convergence suite: for each L, simulate, count, and
/// compare against the closed forms.
pub fn convergence_study(
    g: &Graph,
    h: &HyperParams,
    l_values: &[usize],
    walk_length: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<ConvergenceRow>> {
    let j = j_matrix(g, h, JIndex::Canonical, cap)?;
    let q = q_matrix(g, h, cap)?;
    let j_norm = j.frobenius_norm();
    let walk_seed = derive(seed, &[fnv1a64(b"walks")]);
    let mut rows = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let corpus = simulate_walks(g, l, walk_length, walk_seed)?;
        let counts = count_cooccurrences(&corpus, g.n(), h.window);
        let j_hat = empirical_joint(&counts)?;
        let joint_rel_error = j_hat.sub(&j).frobenius_norm() / j_norm;

        let total = counts.total as f64;
        let vol = g.volume() as f64;
        let mut marginal_max_abs_dev: f64 = 0.0;
        for w in 0..g.n() {
            let emp = counts.word_marginal(w as u32) as f64 / total;
            let exact = g.degree(w as u32) as f64 / vol;
            marginal_max_abs_dev = marginal_max_abs_dev.max((emp - exact).abs());
        }

        let mut pmi_vs_q_max_rel_dev: f64 = 0.0;
        for (w, c, k) in counts.observed_pairs() {
            let mw = counts.word_marginal(w) as f64;
            let mc = counts.context_marginal(c) as f64;
            let emp_q = (k as f64 * total) / (mw * mc) / h.shift;
            let exact = q.get(w as usize, c as usize);
            if exact > 0.0 {
                pmi_vs_q_max_rel_dev = pmi_vs_q_max_rel_dev.max((emp_q - exact).abs() / exact);
            }
        }

        rows.push(ConvergenceRow {
            walks_per_node: l,
            joint_rel_error,
            marginal_max_abs_dev,
            pmi_vs_q_max_rel_dev,
        });
    }
    Ok(rows)
}
