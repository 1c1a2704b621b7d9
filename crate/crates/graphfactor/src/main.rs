//! Command-line surface. Subcommands wrap the library stages: `ingest`
//! normalizes an edge list, `matrix` exports a recipe matrix, `reconstruct`
//! compares ground-truth shifted PMI against a low-rank reconstruction,
//! `evaluate` runs k-fold link prediction, and `oracle` runs the
//! Monte-Carlo convergence study.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use graphfactor::config::{preset_by_name, ConfigBuilder, RunConfig, ORACLE_WALK_COUNTS, SEED_ENV_VAR};
use graphfactor::error::Error;
use graphfactor::graph::load_edge_list;
use graphfactor::heatmap::{shared_min_max, write_pgm};
use graphfactor::linkpred::{evaluate, EvalOptions};
use graphfactor::matrices::{HyperParams, JIndex};
use graphfactor::report::write_convergence_csv;
use graphfactor::rng::{derive, fnv1a64};
use graphfactor::svd::{embed, reconstruct, truncated_svd, write_embedding_csv, DEFAULT_OVERSAMPLE, DEFAULT_POWER_ITERS};
use graphfactor::transforms::{recipe_matrix, MatrixRecipe, RECIPE_TOKENS};
use graphfactor::walks::{clamp_neg_inf, convergence_study, count_cooccurrences, empirical_pmi, simulate_walks, DEFAULT_WALKS_PER_NODE, DEFAULT_WALK_LENGTH};

#[derive(Parser)]
#[command(name = "graphfactor", version, about = "Graph embeddings from random-walk co-occurrence matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize an edge list: remap node ids, drop self-loops and
    /// duplicates, write the node map and clean edge list.
    Ingest(IngestArgs),
    /// Compute one recipe matrix and export it as CSV and GFMX1.
    Matrix(MatrixArgs),
    /// Emit ground-truth shifted PMI, its low-rank reconstruction, and
    /// their difference as CSV and PGM heatmaps.
    Reconstruct(ReconstructArgs),
    /// k-fold link-prediction evaluation over a menu of recipe matrices.
    Evaluate(EvaluateArgs),
    /// Monte-Carlo walk study: empirical co-occurrence statistics against
    /// the closed forms, across increasing sample sizes.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input edge list: '#' comment lines, one "u v" pair per line.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Parameter preset: paper-main (T=10, b=10, d=128, k=5) or
    /// karate-fig1 (T=5, b=1, d=5).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Window size T: number of transition powers in the co-occurrence sum.
    #[arg(long = "T", value_name = "INT")]
    window: Option<usize>,

    /// Shift b: negative-sample count entering the PMI shift log b.
    #[arg(long = "b", value_name = "REAL")]
    shift: Option<f64>,

    /// Embedding dimension d.
    #[arg(long = "dim", value_name = "INT")]
    rank: Option<usize>,

    /// RNG seed; precedence: this flag, then $GRAPHFACTOR_SEED, then 42.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,

    /// Cap on worker threads for parallel sections.
    #[arg(long, value_name = "INT")]
    threads: Option<usize>,

    /// Largest node count allowed to materialize as a dense matrix.
    #[arg(long = "mem-cap", value_name = "NODES")]
    mem_cap: Option<usize>,

    /// Summation range of the joint-probability matrix J:
    /// canonical or paper-literal.
    #[arg(long = "j-index", value_name = "VARIANT", default_value = "canonical")]
    j_index: String,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Recipe token (one of: a, sig_a, j, sig_j, q, sig_q, trunc_log_q,
    /// sig_log_q).
    #[arg(long, value_name = "TOKEN")]
    recipe: String,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Recipe whose factorization forms the reconstruction panel.
    #[arg(long, value_name = "TOKEN", default_value = "trunc_log_q")]
    recipe: String,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Recipes to evaluate (repeatable or comma-separated); the default is
    /// the full menu.
    #[arg(long = "recipe", value_name = "TOKEN", value_delimiter = ',')]
    recipes: Vec<String>,

    /// Number of cross-validation folds.
    #[arg(long, value_name = "INT")]
    folds: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Fully resolved parameters; every command records these in config.json.
struct Resolved {
    graph: PathBuf,
    dataset: String,
    out: PathBuf,
    preset: Option<String>,
    window: usize,
    shift: f64,
    rank: usize,
    folds: usize,
    seed: u64,
    j_index: JIndex,
    mem_cap: usize,
    threads: Option<usize>,
}

impl Resolved {
    fn hyper_params(&self) -> HyperParams {
        HyperParams {
            window: self.window,
            shift: self.shift,
            rank: self.rank,
        }
    }

    fn config(
        &self,
        command: &str,
        recipes: Vec<String>,
        walk_counts: Vec<usize>,
        walk_length: Option<usize>,
    ) -> RunConfig {
        RunConfig {
            command: command.to_string(),
            graph: self.graph.display().to_string(),
            dataset: self.dataset.clone(),
            preset: self.preset.clone(),
            recipes,
            window: self.window,
            shift: self.shift,
            rank: self.rank,
            folds: self.folds,
            seed: self.seed,
            j_index: self.j_index.token().to_string(),
            mem_cap: self.mem_cap,
            threads: self.threads,
            oversample: DEFAULT_OVERSAMPLE,
            power_iters: DEFAULT_POWER_ITERS,
            walk_counts,
            walk_length,
            out: self.out.display().to_string(),
        }
    }
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(s) => s.trim().parse::<u64>().map(Some).map_err(|_| {
            usage(format!(
                "{SEED_ENV_VAR} must be an unsigned integer, got '{s}'"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(usage(format!("{SEED_ENV_VAR}: {e}"))),
    }
}

fn resolve(c: &CommonArgs, folds: Option<usize>) -> Result<Resolved, CliError> {
    let preset = c
        .preset
        .as_deref()
        .map(preset_by_name)
        .transpose()
        .map_err(|e| usage(e.to_string()))?;
    let builder = ConfigBuilder {
        preset,
        window: c.window,
        shift: c.shift,
        rank: c.rank,
        folds,
        seed: c.seed,
        env_seed: env_seed()?,
        mem_cap: c.mem_cap,
        threads: c.threads,
    };
    let (window, shift, rank, folds) = builder.resolve_params();
    if window < 1 {
        return Err(usage("--T must be at least 1"));
    }
    if !(shift > 0.0) || !shift.is_finite() {
        return Err(usage(format!("--b must be a positive finite number, got {shift}")));
    }
    if rank < 1 {
        return Err(usage("--dim must be at least 1"));
    }
    if folds < 2 {
        return Err(usage("--folds must be at least 2"));
    }
    if let Some(0) = c.threads {
        return Err(usage("--threads must be at least 1"));
    }
    let j_index = JIndex::from_token(&c.j_index).map_err(|e| usage(e.to_string()))?;
    let dataset = c
        .graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Resolved {
        graph: c.graph.clone(),
        dataset,
        out: c.out.clone(),
        preset: c.preset.clone(),
        window,
        shift,
        rank,
        folds,
        seed: builder.resolve_seed(),
        j_index,
        mem_cap: builder.resolve_mem_cap(),
        threads: c.threads,
    })
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn prepare_out_dir(res: &Resolved) -> Result<(), CliError> {
    std::fs::create_dir_all(&res.out).map_err(|e| Error::io(&res.out, e))?;
    Ok(())
}

fn parse_recipe(token: &str) -> Result<MatrixRecipe, CliError> {
    MatrixRecipe::from_token(token).map_err(|e| usage(e.to_string()))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let started = Instant::now();
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => {
            eprintln!("done in {:.2?}", started.elapsed());
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn cmd_ingest(a: IngestArgs) -> Result<(), CliError> {
    let res = resolve(&a.common, None)?;
    init_threads(res.threads)?;
    let (g, map, stats) = load_edge_list(&res.graph)?;
    prepare_out_dir(&res)?;
    map.write_csv(&res.out.join("node_map.csv"))?;
    g.save_edge_list(&res.out.join("edges.txt"))?;
    res.config("ingest", Vec::new(), Vec::new(), None)
        .write_json(&res.out)?;
    println!("nodes {}", g.n());
    println!("edges {}", g.n_edges());
    println!("volume {}", g.volume());
    println!("self_loops_dropped {}", stats.self_loops_dropped);
    println!("duplicate_edges_merged {}", stats.duplicate_edges_merged);
    eprintln!("wrote node_map.csv, edges.txt, config.json to {}", res.out.display());
    Ok(())
}

fn cmd_matrix(a: MatrixArgs) -> Result<(), CliError> {
    let recipe = parse_recipe(&a.recipe)?;
    let res = resolve(&a.common, None)?;
    init_threads(res.threads)?;
    let (g, _, _) = load_edge_list(&res.graph)?;
    eprintln!("computing {} on {} (n={}, m={})", recipe.token(), res.dataset, g.n(), g.n_edges());
    let m = recipe_matrix(&g, &recipe, &res.hyper_params(), res.j_index, res.mem_cap)?;
    prepare_out_dir(&res)?;
    let csv = res.out.join(format!("{}.csv", recipe.token()));
    let bin = res.out.join(format!("{}.gfmx", recipe.token()));
    m.write_csv(&csv)?;
    m.write_gfmx(&bin)?;
    res.config("matrix", vec![recipe.token().to_string()], Vec::new(), None)
        .write_json(&res.out)?;
    eprintln!("wrote {} and {}", csv.display(), bin.display());
    Ok(())
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<(), CliError> {
    let recipe = parse_recipe(&a.recipe)?;
    let res = resolve(&a.common, None)?;
    init_threads(res.threads)?;
    let (g, _, _) = load_edge_list(&res.graph)?;
    let h = res.hyper_params();
    h.validate(g.n())?;

    eprintln!(
        "sampling {} walks of length {} per node on {}",
        DEFAULT_WALKS_PER_NODE, DEFAULT_WALK_LENGTH, res.dataset
    );
    let walk_seed = derive(res.seed, &[fnv1a64(b"walks")]);
    let corpus = simulate_walks(&g, DEFAULT_WALKS_PER_NODE, DEFAULT_WALK_LENGTH, walk_seed)?;
    let counts = count_cooccurrences(&corpus, g.n(), h.window);
    let pmi = empirical_pmi(&counts, h.shift)?;
    let unobserved = pmi.data().iter().filter(|v| **v == f64::NEG_INFINITY).count();
    let (ground, clamp) = clamp_neg_inf(&pmi);
    if unobserved > 0 {
        eprintln!("clamped {unobserved} unobserved pairs to {clamp} for display");
    }

    eprintln!("factorizing {} at rank {}", recipe.token(), h.rank);
    let m = recipe_matrix(&g, &recipe, &h, res.j_index, res.mem_cap)?;
    let svd_seed = derive(res.seed, &[fnv1a64(b"svd"), fnv1a64(recipe.token().as_bytes())]);
    let svd = truncated_svd(&m, h.rank, DEFAULT_OVERSAMPLE, DEFAULT_POWER_ITERS, svd_seed)?;
    let y = embed(&svd);
    let recon = reconstruct(&y);
    let diff = ground.sub(&recon);

    prepare_out_dir(&res)?;
    ground.write_csv(&res.out.join("ground_truth.csv"))?;
    recon.write_csv(&res.out.join("reconstruction.csv"))?;
    diff.write_csv(&res.out.join("difference.csv"))?;
    let (lo, hi) = shared_min_max(&[&ground, &recon, &diff]);
    write_pgm(&ground, lo, hi, &res.out.join("ground_truth.pgm"))?;
    write_pgm(&recon, lo, hi, &res.out.join("reconstruction.pgm"))?;
    write_pgm(&diff, lo, hi, &res.out.join("difference.pgm"))?;
    write_embedding_csv(&y, &res.out.join("embedding.csv"))?;
    y.write_gfmx(&res.out.join("embedding.gfmx"))?;
    res.config(
        "reconstruct",
        vec![recipe.token().to_string()],
        vec![DEFAULT_WALKS_PER_NODE],
        Some(DEFAULT_WALK_LENGTH),
    )
    .write_json(&res.out)?;
    eprintln!(
        "wrote ground_truth/reconstruction/difference (csv+pgm) and embedding to {}",
        res.out.display()
    );
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    let tokens: Vec<String> = if a.recipes.is_empty() {
        RECIPE_TOKENS.iter().map(|t| t.to_string()).collect()
    } else {
        a.recipes.clone()
    };
    let recipes = tokens
        .iter()
        .map(|t| parse_recipe(t))
        .collect::<Result<Vec<_>, _>>()?;
    let res = resolve(&a.common, a.folds)?;
    init_threads(res.threads)?;
    let (g, _, _) = load_edge_list(&res.graph)?;
    let h = res.hyper_params();
    eprintln!(
        "evaluating {} recipes x {} folds on {} (n={}, m={}, T={}, b={}, d={})",
        recipes.len(),
        res.folds,
        res.dataset,
        g.n(),
        g.n_edges(),
        h.window,
        h.shift,
        h.rank
    );
    let opts = EvalOptions {
        dataset: res.dataset.clone(),
        j_index: res.j_index,
        cap: res.mem_cap,
        oversample: DEFAULT_OVERSAMPLE,
        power_iters: DEFAULT_POWER_ITERS,
    };
    let report = evaluate(&g, &recipes, &h, res.folds, res.seed, &opts)?;
    prepare_out_dir(&res)?;
    report.write_json(&res.out.join("report.json"))?;
    report.write_markdown(&res.out.join("report.md"))?;
    report.write_summary_csv(&res.out.join("summary.csv"))?;
    report.write_folds_csv(&res.out.join("folds.csv"))?;
    res.config("evaluate", tokens, Vec::new(), None)
        .write_json(&res.out)?;
    eprintln!(
        "wrote report.json, report.md, summary.csv, folds.csv to {}",
        res.out.display()
    );
    if !report.errors.is_empty() {
        return Err(CliError::Runtime(format!(
            "{} recipe evaluations failed; partial results kept in {}",
            report.errors.len(),
            res.out.display()
        )));
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), CliError> {
    let res = resolve(&a.common, None)?;
    init_threads(res.threads)?;
    let (g, _, _) = load_edge_list(&res.graph)?;
    let h = res.hyper_params();
    eprintln!(
        "convergence study on {} (n={}, m={}, T={}, b={}), L in {:?}",
        res.dataset,
        g.n(),
        g.n_edges(),
        h.window,
        h.shift,
        ORACLE_WALK_COUNTS
    );
    let rows = convergence_study(
        &g,
        &h,
        &ORACLE_WALK_COUNTS,
        DEFAULT_WALK_LENGTH,
        res.seed,
        res.mem_cap,
    )?;
    for r in &rows {
        eprintln!(
            "L={}: joint rel err {:.4}, marginal max dev {:.4}, pmi-vs-q max rel dev {:.4}",
            r.walks_per_node, r.joint_rel_error, r.marginal_max_abs_dev, r.pmi_vs_q_max_rel_dev
        );
    }
    prepare_out_dir(&res)?;
    write_convergence_csv(
        &rows,
        &res.dataset,
        h.window,
        DEFAULT_WALK_LENGTH,
        res.seed,
        &res.out.join("convergence.csv"),
    )?;
    res.config(
        "oracle",
        Vec::new(),
        ORACLE_WALK_COUNTS.to_vec(),
        Some(DEFAULT_WALK_LENGTH),
    )
    .write_json(&res.out)?;
    eprintln!("wrote convergence.csv to {}", res.out.display());
    Ok(())
}
