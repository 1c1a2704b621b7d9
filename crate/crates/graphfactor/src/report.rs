//! Evaluation report: JSON serialization, markdown and CSV tables, and the
//! Monte-Carlo convergence table. All writers are deterministic byte for
//! byte given the same report.

use std::fmt::Write as _;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walks::ConvergenceRow;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FoldScores {
    pub train_auc: f64,
    pub test_auc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportParams {
    /// Window size T.
    pub window: usize,
    /// Shift b.
    pub shift: f64,
    /// Embedding dimension d.
    pub rank: usize,
    pub folds: usize,
    pub seed: u64,
    pub j_index: String,
    pub oversample: usize,
    pub power_iters: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecipeReport {
    pub name: String,
    pub folds: Vec<FoldScores>,
    /// Mean test ROC AUC across folds.
    pub mean: f64,
    /// Sample standard deviation of the test ROC AUC across folds.
    pub sd: f64,
    pub train_mean: f64,
    pub train_sd: f64,
    /// Percent difference of mean test AUC against trunc_log_q.
    pub phi_vs_trunc: Option<f64>,
    /// Percent difference of mean test AUC against mean train AUC.
    pub gen_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmoidEffect {
    pub sigmoid: String,
    pub base: String,
    pub base_mean: f64,
    pub sigmoid_mean: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecipeError {
    pub recipe: String,
    pub fold: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub params: ReportParams,
    pub recipes: Vec<RecipeReport>,
    pub sigmoid_effects: Vec<SigmoidEffect>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<RecipeError>,
}

impl EvalReport {
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Format(format!("report serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?).map_err(|e| Error::io(path, e))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(format!("bad report JSON: {e}")))
    }

    /// Three markdown tables: test scores with percent difference against
    /// trunc_log_q, the sigmoid effect, and train-versus-test
    /// generalization.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Link prediction on {}", self.dataset);
        let _ = writeln!(out);
        let p = &self.params;
        let _ = writeln!(
            out,
            "window={} shift={} rank={} folds={} seed={} j_index={}",
            p.window, p.shift, p.rank, p.folds, p.seed, p.j_index
        );

        let _ = writeln!(out);
        let _ = writeln!(out, "## Test ROC AUC");
        let _ = writeln!(out);
        let _ = writeln!(out, "| recipe | test AUC | sd | vs trunc_log_q (%) |");
        let _ = writeln!(out, "|---|---|---|---|");
        for r in &self.recipes {
            if r.folds.is_empty() {
                let _ = writeln!(out, "| {} | error | error | error |", r.name);
                continue;
            }
            let _ = writeln!(
                out,
                "| {} | {:.4} | {:.4} | {} |",
                r.name,
                r.mean,
                r.sd,
                fmt_opt_pct(r.phi_vs_trunc)
            );
        }

        let _ = writeln!(out);
        let _ = writeln!(out, "## Sigmoid effect");
        let _ = writeln!(out);
        let _ = writeln!(out, "| pair | base AUC | sigmoid AUC | effect (%) |");
        let _ = writeln!(out, "|---|---|---|---|");
        for e in &self.sigmoid_effects {
            let _ = writeln!(
                out,
                "| {} -> {} | {:.4} | {:.4} | {:+.2} |",
                e.base, e.sigmoid, e.base_mean, e.sigmoid_mean, e.phi
            );
        }

        let _ = writeln!(out);
        let _ = writeln!(out, "## Train vs test generalization");
        let _ = writeln!(out);
        let _ = writeln!(out, "| recipe | train AUC | test AUC | gap (%) |");
        let _ = writeln!(out, "|---|---|---|---|");
        for r in &self.recipes {
            if r.folds.is_empty() {
                continue;
            }
            let _ = writeln!(
                out,
                "| {} | {:.4} | {:.4} | {} |",
                r.name,
                r.train_mean,
                r.mean,
                fmt_opt_pct(r.gen_gap)
            );
        }

        if !self.errors.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "## Errors");
            let _ = writeln!(out);
            for e in &self.errors {
                let _ = writeln!(out, "- {} fold {}: {}", e.recipe, e.fold, e.message);
            }
        }
        out
    }

    pub fn write_markdown(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_markdown()).map_err(|e| Error::io(path, e))
    }

    /// Per-recipe aggregate CSV.
    pub fn write_summary_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(
                w,
                "recipe,test_mean,test_sd,train_mean,train_sd,phi_vs_trunc,gen_gap"
            )?;
            for r in &self.recipes {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    r.name,
                    r.mean,
                    r.sd,
                    r.train_mean,
                    r.train_sd,
                    fmt_opt(r.phi_vs_trunc),
                    fmt_opt(r.gen_gap)
                )?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }

    /// Per-fold raw scores CSV.
    pub fn write_folds_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(w, "recipe,fold,train_auc,test_auc")?;
            for r in &self.recipes {
                for (i, f) in r.folds.iter().enumerate() {
                    writeln!(w, "{},{},{},{}", r.name, i, f.train_auc, f.test_auc)?;
                }
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn fmt_opt_pct(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:+.2}"),
        None => "-".to_string(),
    }
}

/// Convergence table for the Monte-Carlo suite; the seed goes into a
/// comment header so the run is reproducible from the file alone.
pub fn write_convergence_csv(
    rows: &[ConvergenceRow],
    dataset: &str,
    window: usize,
    walk_length: usize,
    seed: u64,
    path: &Path,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(
            w,
            "# dataset={dataset} window={window} walk_length={walk_length} seed={seed}"
        )?;
        writeln!(
            w,
            "walks_per_node,joint_rel_error,marginal_max_abs_dev,pmi_vs_q_max_rel_dev"
        )?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.walks_per_node, r.joint_rel_error, r.marginal_max_abs_dev, r.pmi_vs_q_max_rel_dev
            )?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}
