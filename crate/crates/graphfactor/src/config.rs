//! Resolved run configuration. Every command writes this into its output
//! directory so any artifact is reproducible from the config plus the
//! dataset file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::DEFAULT_DENSE_CAP;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV_VAR: &str = "GRAPHFACTOR_SEED";
pub const ORACLE_WALK_COUNTS: [usize; 3] = [100, 1_000, 10_000];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub window: usize,
    pub shift: f64,
    pub rank: usize,
    pub folds: usize,
}

/// Defaults for large-graph evaluation runs.
pub const PRESET_MAIN: Preset = Preset {
    name: "paper-main",
    window: 10,
    shift: 10.0,
    rank: 128,
    folds: 5,
};

/// Small-graph reconstruction preset (dim 5, shift 1, window 5).
pub const PRESET_KARATE: Preset = Preset {
    name: "karate-fig1",
    window: 5,
    shift: 1.0,
    rank: 5,
    folds: 5,
};

pub fn preset_by_name(name: &str) -> Result<Preset> {
    match name {
        "paper-main" => Ok(PRESET_MAIN),
        "karate-fig1" => Ok(PRESET_KARATE),
        _ => Err(Error::InvalidParam(format!(
            "unknown preset '{name}'; valid presets: paper-main, karate-fig1"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub graph: String,
    pub dataset: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preset: Option<String>,
    pub recipes: Vec<String>,
    pub window: usize,
    pub shift: f64,
    pub rank: usize,
    pub folds: usize,
    pub seed: u64,
    pub j_index: String,
    pub mem_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threads: Option<usize>,
    pub oversample: usize,
    pub power_iters: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub walk_counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub walk_length: Option<usize>,
    pub out: String,
}

impl RunConfig {
    pub fn write_json(&self, dir: &Path) -> Result<()> {
        let path = dir.join("config.json");
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Format(format!("config serialization failed: {e}")))?;
        s.push('\n');
        std::fs::write(&path, s).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("bad config JSON: {e}")))
    }
}

/// Layered resolution: built-in defaults, then the preset, then explicit
/// values; the seed falls back to the environment, then to DEFAULT_SEED.
pub struct ConfigBuilder {
    pub preset: Option<Preset>,
    pub window: Option<usize>,
    pub shift: Option<f64>,
    pub rank: Option<usize>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub env_seed: Option<u64>,
    pub mem_cap: Option<usize>,
    pub threads: Option<usize>,
}

impl ConfigBuilder {
    pub fn resolve_params(&self) -> (usize, f64, usize, usize) {
        let base = self.preset.unwrap_or(PRESET_MAIN);
        (
            self.window.unwrap_or(base.window),
            self.shift.unwrap_or(base.shift),
            self.rank.unwrap_or(base.rank),
            self.folds.unwrap_or(base.folds),
        )
    }

    pub fn resolve_seed(&self) -> u64 {
        self.seed.or(self.env_seed).unwrap_or(DEFAULT_SEED)
    }

    pub fn resolve_mem_cap(&self) -> usize {
        self.mem_cap.unwrap_or(DEFAULT_DENSE_CAP)
    }
}
