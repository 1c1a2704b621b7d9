//! Link-prediction evaluation: k-fold edge cross-validation with sampled
//! negatives, fixed-classifier scoring sigma(y_u . y_v), rank-based ROC
//! AUC, and the percent comparisons between recipes.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrices::{j_matrix, q_matrix, HyperParams, JIndex};
use crate::report::{EvalReport, FoldScores, RecipeError, RecipeReport, ReportParams, SigmoidEffect};
use crate::rng::{derive, fnv1a64, rng_from_seed};
use crate::svd::{embed, truncated_svd};
use crate::transforms::{apply_recipe, sigmoid, Base, MatrixRecipe, SIGMOID_PAIRS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Train,
    Test,
}

/// Canonical (u < v) unordered pairs without duplicates.
#[derive(Debug, Clone)]
pub struct EdgeSubset {
    pub pairs: Vec<(u32, u32)>,
    pub label: Label,
    pub origin: Origin,
}

impl EdgeSubset {
    fn new(mut pairs: Vec<(u32, u32)>, label: Label, origin: Origin) -> Self {
        pairs.sort_unstable();
        debug_assert!(pairs.windows(2).all(|w| w[0] != w[1]));
        debug_assert!(pairs.iter().all(|&(u, v)| u < v));
        EdgeSubset {
            pairs,
            label,
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct FoldSplit {
    pub fold: usize,
    pub train_pos: EdgeSubset,
    pub test_pos: EdgeSubset,
    pub train_neg: EdgeSubset,
    pub test_neg: EdgeSubset,
    pub seed: u64,
}

impl FoldSplit {
    /// Re-asserts the split invariants against the source graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParam(msg));
        let train: HashSet<_> = self.train_pos.pairs.iter().copied().collect();
        let test: HashSet<_> = self.test_pos.pairs.iter().copied().collect();
        if !train.is_disjoint(&test) {
            return fail(format!("fold {}: train and test positives overlap", self.fold));
        }
        if train.len() + test.len() != g.n_edges()
            || !g.edges().iter().all(|e| train.contains(e) || test.contains(e))
        {
            return fail(format!(
                "fold {}: positives do not partition the edge set",
                self.fold
            ));
        }
        let train_neg: HashSet<_> = self.train_neg.pairs.iter().copied().collect();
        let test_neg: HashSet<_> = self.test_neg.pairs.iter().copied().collect();
        if !train_neg.is_disjoint(&test_neg) {
            return fail(format!("fold {}: negative sets overlap", self.fold));
        }
        for &(u, v) in train_neg.iter().chain(&test_neg) {
            if g.contains_edge(u, v) {
                return fail(format!("fold {}: negative ({u}, {v}) is an edge", self.fold));
            }
        }
        if self.train_neg.len() != self.train_pos.len() || self.test_neg.len() != self.test_pos.len()
        {
            return fail(format!(
                "fold {}: negative counts do not match positives",
                self.fold
            ));
        }
        Ok(())
    }
}

/// Shuffles E with the seeded generator and cuts it into k near-equal test
/// folds; each fold's negatives are freshly sampled, 1:1 with positives,
/// disjoint from E and from each other within the fold.
pub fn kfold_split(g: &Graph, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(Error::InvalidParam("folds must be at least 2".into()));
    }
    let m = g.n_edges();
    if m < k {
        return Err(Error::InvalidParam(format!(
            "graph has {m} edges, fewer than {k} folds"
        )));
    }
    let mut edges = g.edges().to_vec();
    let mut rng = rng_from_seed(derive(seed, &[fnv1a64(b"kfold")]));
    edges.shuffle(&mut rng);

    let base = m / k;
    let extra = m % k;
    let mut splits = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        let test_pos: Vec<_> = edges[start..start + size].to_vec();
        let train_pos: Vec<_> = edges[..start]
            .iter()
            .chain(&edges[start + size..])
            .copied()
            .collect();
        start += size;

        let test_neg = sample_negatives(
            g,
            test_pos.len(),
            &HashSet::new(),
            derive(seed, &[fnv1a64(b"negatives"), fold as u64, 0]),
        )?;
        let exclude: HashSet<(u32, u32)> = test_neg.iter().copied().collect();
        let train_neg = sample_negatives(
            g,
            train_pos.len(),
            &exclude,
            derive(seed, &[fnv1a64(b"negatives"), fold as u64, 1]),
        )?;

        splits.push(FoldSplit {
            fold,
            train_pos: EdgeSubset::new(train_pos, Label::Positive, Origin::Train),
            test_pos: EdgeSubset::new(test_pos, Label::Positive, Origin::Test),
            train_neg: EdgeSubset::new(train_neg, Label::Negative, Origin::Train),
            test_neg: EdgeSubset::new(test_neg, Label::Negative, Origin::Test),
            seed,
        });
    }
    Ok(splits)
}

/// Uniform rejection sampling of `count` canonical non-edges outside
/// `exclude`, without replacement.
pub fn sample_negatives(
    g: &Graph,
    count: usize,
    exclude: &HashSet<(u32, u32)>,
    seed: u64,
) -> Result<Vec<(u32, u32)>> {
    let n = g.n();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let excluded_non_edges = exclude
        .iter()
        .filter(|&&(u, v)| !g.contains_edge(u, v))
        .count();
    let available = all_pairs - g.n_edges() - excluded_non_edges;
    if count > available {
        return Err(Error::NotEnoughNegatives {
            requested: count,
            available,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if g.contains_edge(e.0, e.1) || exclude.contains(&e) || !chosen.insert(e) {
            continue;
        }
        out.push(e);
    }
    out.sort_unstable();
    Ok(out)
}

/// score(u, v) = sigma(y_u . y_v), pairwise; the full Y Y^T is never formed.
pub fn score_pairs(y: &DenseMatrix, pairs: &[(u32, u32)]) -> Result<Vec<f64>> {
    let n = y.n_rows();
    let mut out = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        for id in [u, v] {
            if id as usize >= n {
                return Err(Error::NodeOutOfRange { id, n });
            }
        }
        let dot: f64 = y
            .row(u as usize)
            .iter()
            .zip(y.row(v as usize))
            .map(|(&a, &b)| a * b)
            .sum();
        out.push(sigmoid(dot));
    }
    Ok(out)
}

/// Mann-Whitney rank statistic with ties contributing a half, computed in
/// O(m log m) via average ranks.
pub fn roc_auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // 1-based ranks i+1 ..= j averaged over the tie run.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_run = all[i..j].iter().filter(|&&(_, p)| p).count();
        rank_sum_pos += avg_rank * pos_in_run as f64;
        i = j;
    }
    let np = pos.len() as f64;
    let nn = neg.len() as f64;
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}

/// Signed percent difference (x - y)/y * 100.
pub fn phi(x: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok((x - y) / y * 100.0)
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub dataset: String,
    pub j_index: JIndex,
    pub cap: usize,
    pub oversample: usize,
    pub power_iters: usize,
}

/// Runs the full protocol: for every fold, build the train subgraph,
/// compute each recipe's matrix on it, factorize at rank h.rank, and score
/// train and test pairs; then aggregate means, SDs, percent comparisons
/// against trunc_log_q, sigmoid effects, and generalization gaps.
/// Fold-major, recipe-minor order; a failed recipe becomes an error entry
/// without aborting the rest.
pub fn evaluate(
    g: &Graph,
    recipes: &[MatrixRecipe],
    h: &HyperParams,
    k: usize,
    seed: u64,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    h.validate(g.n())?;
    for r in recipes {
        r.validate()?;
    }
    let folds = kfold_split(g, k, seed)?;

    let mut fold_scores: Vec<Vec<Option<FoldScores>>> = vec![Vec::new(); recipes.len()];
    let mut errors: Vec<RecipeError> = Vec::new();

    for split in &folds {
        split.validate(g)?;
        let train_graph = g.subgraph_from_edges(&split.train_pos.pairs)?;

        let mut base_a: Option<DenseMatrix> = None;
        let mut base_j: Option<DenseMatrix> = None;
        let mut base_q: Option<DenseMatrix> = None;

        for (ri, recipe) in recipes.iter().enumerate() {
            let result = (|| -> Result<FoldScores> {
                let base = match recipe.base {
                    Base::Adjacency => {
                        base_a.get_or_insert_with(|| train_graph.adjacency().to_dense())
                    }
                    Base::Joint => match &mut base_j {
                        Some(m) => m,
                        slot => slot.insert(j_matrix(&train_graph, h, opts.j_index, opts.cap)?),
                    },
                    Base::Q => match &mut base_q {
                        Some(m) => m,
                        slot => slot.insert(q_matrix(&train_graph, h, opts.cap)?),
                    },
                };
                let m = apply_recipe(base, recipe)?;
                let svd_seed = derive(
                    seed,
                    &[
                        fnv1a64(b"svd"),
                        split.fold as u64,
                        fnv1a64(recipe.token().as_bytes()),
                    ],
                );
                let emb = truncated_svd(&m, h.rank, opts.oversample, opts.power_iters, svd_seed)?;
                let y = embed(&emb);

                let train_auc = roc_auc(
                    &score_pairs(&y, &split.train_pos.pairs)?,
                    &score_pairs(&y, &split.train_neg.pairs)?,
                )?;
                let test_auc = roc_auc(
                    &score_pairs(&y, &split.test_pos.pairs)?,
                    &score_pairs(&y, &split.test_neg.pairs)?,
                )?;
                Ok(FoldScores {
                    train_auc,
                    test_auc,
                })
            })();
            match result {
                Ok(scores) => fold_scores[ri].push(Some(scores)),
                Err(e) => {
                    fold_scores[ri].push(None);
                    errors.push(RecipeError {
                        recipe: recipe.token().to_string(),
                        fold: split.fold,
                        message: e.to_string(),
                    });
                }
            }
        }
    }

    let mut reports: Vec<RecipeReport> = Vec::with_capacity(recipes.len());
    for (ri, recipe) in recipes.iter().enumerate() {
        let ok: Vec<FoldScores> = fold_scores[ri].iter().flatten().copied().collect();
        let (mean, sd) = mean_sd(ok.iter().map(|f| f.test_auc));
        let (train_mean, train_sd) = mean_sd(ok.iter().map(|f| f.train_auc));
        let gen_gap = if ok.is_empty() {
            None
        } else {
            phi(mean, train_mean).ok()
        };
        reports.push(RecipeReport {
            name: recipe.token().to_string(),
            folds: ok,
            mean,
            sd,
            train_mean,
            train_sd,
            phi_vs_trunc: None,
            gen_gap,
        });
    }

    let trunc_mean = reports
        .iter()
        .find(|r| r.name == "trunc_log_q" && !r.folds.is_empty())
        .map(|r| r.mean);
    if let Some(tm) = trunc_mean {
        for r in &mut reports {
            if !r.folds.is_empty() {
                r.phi_vs_trunc = phi(r.mean, tm).ok();
            }
        }
    }

    let mut sigmoid_effects = Vec::new();
    for &(sig_token, base_token) in SIGMOID_PAIRS.iter() {
        let sig = reports.iter().find(|r| r.name == sig_token && !r.folds.is_empty());
        let base = reports.iter().find(|r| r.name == base_token && !r.folds.is_empty());
        if let (Some(s), Some(b)) = (sig, base) {
            if let Ok(p) = phi(s.mean, b.mean) {
                sigmoid_effects.push(SigmoidEffect {
                    sigmoid: sig_token.to_string(),
                    base: base_token.to_string(),
                    base_mean: b.mean,
                    sigmoid_mean: s.mean,
                    phi: p,
                });
            }
        }
    }

    Ok(EvalReport {
        dataset: opts.dataset.clone(),
        params: ReportParams {
            window: h.window,
            shift: h.shift,
            rank: h.rank,
            folds: k,
            seed,
            j_index: opts.j_index.token().to_string(),
            oversample: opts.oversample,
            power_iters: opts.power_iters,
        },
        recipes: reports,
        sigmoid_effects,
        errors,
    })
}

fn mean_sd(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let vals: Vec<f64> = values.collect();
    if vals.is_empty() {
        return (0.0, 0.0);
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
