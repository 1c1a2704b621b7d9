//! End-to-end checks of the command-line interface: exit codes, error
//! text, output files, and seed handling.

mod util;

use std::path::Path;
use std::process::{Command, Output};

use util::karate_path;

fn graphfactor(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_graphfactor"));
    cmd.args(args).env_remove("GRAPHFACTOR_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    graphfactor(args).output().unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_k3(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("k3.txt");
    std::fs::write(&p, "0 1\n0 2\n1 2\n").unwrap();
    p
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["ingest", "matrix", "reconstruct", "evaluate", "oracle"] {
        assert!(text.contains(sub), "--help does not mention {sub}");
    }
    assert!(run(&["--version"]).status.success());
}

#[test]
fn unknown_recipe_exits_2_and_lists_the_menu() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let out = run(&[
        "matrix",
        "--graph",
        k3.to_str().unwrap(),
        "--recipe",
        "bogus",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    for token in [
        "a", "sig_a", "j", "sig_j", "q", "sig_q", "trunc_log_q", "sig_log_q",
    ] {
        assert!(err.contains(token), "menu missing {token}: {err}");
    }
}

#[test]
fn unknown_preset_and_j_index_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let k3s = k3.to_str().unwrap();
    let o = tmp.path().join("o");
    let os = o.to_str().unwrap();

    let out = run(&["ingest", "--graph", k3s, "--preset", "nope", "--out", os]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("paper-main") && err.contains("karate-fig1"), "{err}");

    let out = run(&[
        "matrix", "--graph", k3s, "--recipe", "j", "--j-index", "weird", "--out", os,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("canonical") && err.contains("paper-literal"), "{err}");
}

#[test]
fn bad_seed_env_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let out = graphfactor(&[
        "ingest",
        "--graph",
        k3.to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ])
    .env("GRAPHFACTOR_SEED", "banana")
    .output()
    .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("GRAPHFACTOR_SEED"));
}

#[test]
fn missing_graph_file_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "ingest",
        "--graph",
        tmp.path().join("absent.txt").to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("absent.txt"));
}

#[test]
fn ingest_writes_canonical_edge_list_and_node_map() {
    let tmp = tempfile::tempdir().unwrap();
    let o1 = tmp.path().join("o1");
    let out = run(&[
        "ingest",
        "--graph",
        karate_path().to_str().unwrap(),
        "--out",
        o1.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let map = std::fs::read_to_string(o1.join("node_map.csv")).unwrap();
    assert!(map.starts_with("external_id,internal_id\n"));
    assert_eq!(map.lines().count(), 35);
    assert!(o1.join("config.json").exists());

    // Re-ingesting the canonical output must be a fixed point.
    let o2 = tmp.path().join("o2");
    let out = run(&[
        "ingest",
        "--graph",
        o1.join("edges.txt").to_str().unwrap(),
        "--out",
        o2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(o1.join("edges.txt")).unwrap(),
        std::fs::read(o2.join("edges.txt")).unwrap()
    );
}

#[test]
fn matrix_emits_known_entry_and_both_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let o = tmp.path().join("o");
    let out = run(&[
        "matrix",
        "--graph",
        k3.to_str().unwrap(),
        "--recipe",
        "trunc_log_q",
        "--T",
        "1",
        "--b",
        "1",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    // On the triangle with T=1, b=1 every off-diagonal Q entry is 3/2, so
    // the truncated log is ln(1.5).
    let csv = std::fs::read_to_string(o.join("trunc_log_q.csv")).unwrap();
    assert!(
        csv.contains("0.4054651081081644"),
        "expected ln(1.5) in:\n{csv}"
    );
    assert!(o.join("trunc_log_q.gfmx").exists());
    assert!(o.join("config.json").exists());
}

#[test]
fn matrix_paper_literal_j_index_changes_the_off_diagonal() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let parse = |path: &Path| -> Vec<Vec<f64>> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    };

    let run_j = |j_index: &str, out: &Path| {
        let st = run(&[
            "matrix",
            "--graph",
            k3.to_str().unwrap(),
            "--recipe",
            "j",
            "--T",
            "2",
            "--b",
            "1",
            "--j-index",
            j_index,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success(), "{}", stderr_of(&st));
        parse(&out.join("j.csv"))
    };

    let canonical = run_j("canonical", &tmp.path().join("c"));
    let literal = run_j("paper-literal", &tmp.path().join("l"));
    for i in 0..3 {
        for j in 0..3 {
            let (c, l) = (canonical[i][j], literal[i][j]);
            if i == j {
                assert!((c - 1.0 / 12.0).abs() <= 1e-15, "canonical diag {c}");
                assert!((l - 1.0 / 12.0).abs() <= 1e-15, "literal diag {l}");
            } else {
                assert!((c - 1.0 / 8.0).abs() <= 1e-15, "canonical off {c}");
                assert!((l - 1.0 / 24.0).abs() <= 1e-15, "literal off {l}");
            }
        }
    }
}

#[test]
fn reconstruct_writes_square_heatmaps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().join("o");
    let out = run(&[
        "reconstruct",
        "--graph",
        karate_path().to_str().unwrap(),
        "--preset",
        "karate-fig1",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    for name in ["ground_truth.pgm", "reconstruction.pgm", "difference.pgm"] {
        let bytes = std::fs::read(o.join(name)).unwrap();
        assert!(bytes.starts_with(b"P5\n34 34\n255\n"), "{name} header");
        assert_eq!(bytes.len(), 13 + 34 * 34, "{name} payload size");
    }
    let emb = std::fs::read_to_string(o.join("embedding.csv")).unwrap();
    assert_eq!(emb.lines().count(), 1 + 34);
    assert!(emb.starts_with("node,y0,y1,y2,y3,y4\n"));
    assert_eq!(emb.lines().nth(1).unwrap().split(',').count(), 6);
}

#[test]
fn evaluate_writes_reports_and_respects_recipe_list() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().join("o");
    let out = run(&[
        "evaluate",
        "--graph",
        karate_path().to_str().unwrap(),
        "--recipe",
        "a,trunc_log_q",
        "--T",
        "2",
        "--b",
        "1",
        "--dim",
        "8",
        "--folds",
        "3",
        "--seed",
        "5",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(o.join("report.json")).unwrap()).unwrap();
    let names: Vec<&str> = report["recipes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["a", "trunc_log_q"]);
    assert_eq!(report["params"]["folds"], 3);

    let summary = std::fs::read_to_string(o.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    let folds = std::fs::read_to_string(o.join("folds.csv")).unwrap();
    assert_eq!(folds.lines().count(), 1 + 2 * 3);
    assert!(o.join("report.md").exists());
    assert!(o.join("config.json").exists());
}

#[test]
fn seed_env_matches_flag_and_flag_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |o: &Path| {
        vec![
            "evaluate".to_string(),
            "--graph".into(),
            karate_path().to_str().unwrap().into(),
            "--recipe".into(),
            "a".into(),
            "--T".into(),
            "1".into(),
            "--dim".into(),
            "4".into(),
            "--folds".into(),
            "2".into(),
            "--out".into(),
            o.to_str().unwrap().into(),
        ]
    };

    let o_flag = tmp.path().join("flag");
    let mut flag_args = args(&o_flag);
    flag_args.extend(["--seed".into(), "99".into()]);
    assert!(graphfactor(&[]).args(&flag_args).output().unwrap().status.success());

    let o_env = tmp.path().join("env");
    assert!(graphfactor(&[])
        .args(args(&o_env))
        .env("GRAPHFACTOR_SEED", "99")
        .output()
        .unwrap()
        .status
        .success());

    let o_both = tmp.path().join("both");
    let mut both_args = args(&o_both);
    both_args.extend(["--seed".into(), "99".into()]);
    assert!(graphfactor(&[])
        .args(&both_args)
        .env("GRAPHFACTOR_SEED", "123")
        .output()
        .unwrap()
        .status
        .success());

    let report = |o: &Path| std::fs::read(o.join("report.json")).unwrap();
    assert_eq!(report(&o_flag), report(&o_env), "env seed diverged from flag");
    assert_eq!(report(&o_flag), report(&o_both), "flag did not win over env");
}

#[test]
fn oracle_writes_convergence_table() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let o = tmp.path().join("o");
    let out = run(&[
        "oracle",
        "--graph",
        k3.to_str().unwrap(),
        "--T",
        "2",
        "--b",
        "1",
        "--out",
        o.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let table = std::fs::read_to_string(o.join("convergence.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with('#'), "missing comment line");
    assert_eq!(
        lines.next().unwrap(),
        "walks_per_node,joint_rel_error,marginal_max_abs_dev,pmi_vs_q_max_rel_dev"
    );
    let counts: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(counts, ["100", "1000", "10000"]);
}
