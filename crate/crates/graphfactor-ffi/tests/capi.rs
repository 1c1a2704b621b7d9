//! Exercises the C ABI from Rust: handle lifecycle, status codes, the
//! thread-local error message, and determinism of the JSON report.

use std::ffi::{c_char, CStr, CString};
use std::io::Write;
use std::path::Path;
use std::ptr;

use graphfactor_ffi::*;

fn karate_path() -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/karate.txt");
    CString::new(p.to_str().unwrap()).unwrap()
}

fn k3_file() -> (tempfile::TempDir, CString) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k3.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "0 1\n0 2\n1 2").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    (dir, c)
}

fn last_error_string() -> String {
    let p = gf_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn graph_load_and_queries() {
    let path = karate_path();
    let mut g: *mut GfGraph = ptr::null_mut();
    let status = unsafe { gf_graph_load(path.as_ptr(), &mut g) };
    assert_eq!(status, GfStatus::Ok);
    assert!(!g.is_null());
    unsafe {
        assert_eq!(gf_graph_nodes(g), 34);
        assert_eq!(gf_graph_edges(g), 78);
        assert_eq!(gf_graph_volume(g), 156);
        gf_graph_free(g);
    }
}

#[test]
fn load_missing_file_reports_io_error() {
    let path = CString::new("/nonexistent/graph.txt").unwrap();
    let mut g: *mut GfGraph = ptr::null_mut();
    let status = unsafe { gf_graph_load(path.as_ptr(), &mut g) };
    assert_eq!(status, GfStatus::Io);
    assert!(g.is_null());
    assert!(last_error_string().contains("/nonexistent/graph.txt"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut g: *mut GfGraph = ptr::null_mut();
    assert_eq!(
        unsafe { gf_graph_load(ptr::null(), &mut g) },
        GfStatus::NullArgument
    );
    let path = karate_path();
    assert_eq!(
        unsafe { gf_graph_load(path.as_ptr(), ptr::null_mut()) },
        GfStatus::NullArgument
    );
    unsafe {
        assert_eq!(gf_graph_nodes(ptr::null()), 0);
        assert!(gf_matrix_data(ptr::null()).is_null());
        gf_graph_free(ptr::null_mut());
        gf_matrix_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());
    }
}

#[test]
fn matrix_compute_hand_value() {
    let (_dir, path) = k3_file();
    let mut g: *mut GfGraph = ptr::null_mut();
    assert_eq!(
        unsafe { gf_graph_load(path.as_ptr(), &mut g) },
        GfStatus::Ok
    );

    let token = CString::new("trunc_log_q").unwrap();
    let mut m: *mut GfMatrix = ptr::null_mut();
    let status = unsafe { gf_matrix_compute(g, token.as_ptr(), 1, 1.0, 0, 0, &mut m) };
    assert_eq!(status, GfStatus::Ok);
    unsafe {
        assert_eq!(gf_matrix_rows(m), 3);
        assert_eq!(gf_matrix_cols(m), 3);
        let mut v = 0.0;
        assert_eq!(gf_matrix_get(m, 0, 1, &mut v), GfStatus::Ok);
        assert!((v - 1.5f64.ln()).abs() < 1e-12);
        assert_eq!(gf_matrix_get(m, 0, 0, &mut v), GfStatus::Ok);
        assert_eq!(v, 0.0);

        let data = gf_matrix_data(m);
        assert!(!data.is_null());
        let slice = std::slice::from_raw_parts(data, 9);
        assert!((slice[1] - 1.5f64.ln()).abs() < 1e-12);

        assert_eq!(gf_matrix_get(m, 3, 0, &mut v), GfStatus::InvalidArgument);
        assert!(last_error_string().contains("out of range"));

        gf_matrix_free(m);
        gf_graph_free(g);
    }
}

#[test]
fn unknown_recipe_is_invalid_argument() {
    let (_dir, path) = k3_file();
    let mut g: *mut GfGraph = ptr::null_mut();
    assert_eq!(
        unsafe { gf_graph_load(path.as_ptr(), &mut g) },
        GfStatus::Ok
    );
    let token = CString::new("bogus").unwrap();
    let mut m: *mut GfMatrix = ptr::null_mut();
    let status = unsafe { gf_matrix_compute(g, token.as_ptr(), 1, 1.0, 0, 0, &mut m) };
    assert_eq!(status, GfStatus::InvalidArgument);
    assert!(last_error_string().contains("trunc_log_q"));
    unsafe { gf_graph_free(g) };
}

#[test]
fn embed_shapes_and_determinism() {
    let path = karate_path();
    let mut g: *mut GfGraph = ptr::null_mut();
    assert_eq!(
        unsafe { gf_graph_load(path.as_ptr(), &mut g) },
        GfStatus::Ok
    );
    let token = CString::new("q").unwrap();
    let mut m: *mut GfMatrix = ptr::null_mut();
    assert_eq!(
        unsafe { gf_matrix_compute(g, token.as_ptr(), 2, 1.0, 0, 0, &mut m) },
        GfStatus::Ok
    );

    let mut y1: *mut GfMatrix = ptr::null_mut();
    let mut y2: *mut GfMatrix = ptr::null_mut();
    unsafe {
        assert_eq!(gf_embed(m, 4, 10, 7, 9, &mut y1), GfStatus::Ok);
        assert_eq!(gf_embed(m, 4, 10, 7, 9, &mut y2), GfStatus::Ok);
        assert_eq!(gf_matrix_rows(y1), 34);
        assert_eq!(gf_matrix_cols(y1), 4);
        let a = std::slice::from_raw_parts(gf_matrix_data(y1), 34 * 4);
        let b = std::slice::from_raw_parts(gf_matrix_data(y2), 34 * 4);
        assert_eq!(a, b);

        let mut bad: *mut GfMatrix = ptr::null_mut();
        assert_eq!(gf_embed(m, 0, 10, 7, 9, &mut bad), GfStatus::InvalidArgument);

        gf_matrix_free(y1);
        gf_matrix_free(y2);
        gf_matrix_free(m);
        gf_graph_free(g);
    }
}

#[test]
fn evaluate_json_roundtrips_and_is_deterministic() {
    let path = karate_path();
    let dataset = CString::new("karate").unwrap();
    let recipes = CString::new("a,j").unwrap();
    let mut g: *mut GfGraph = ptr::null_mut();
    assert_eq!(
        unsafe { gf_graph_load(path.as_ptr(), &mut g) },
        GfStatus::Ok
    );

    let run = |g: *const GfGraph| -> String {
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            gf_evaluate_json(
                g,
                dataset.as_ptr(),
                recipes.as_ptr(),
                2,
                1.0,
                4,
                2,
                7,
                0,
                &mut out,
            )
        };
        assert_eq!(status, GfStatus::Ok);
        let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        unsafe { gf_string_free(out) };
        s
    };

    let first = run(g);
    let second = run(g);
    assert_eq!(first, second);

    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed["dataset"], "karate");
    assert_eq!(parsed["recipes"].as_array().unwrap().len(), 2);
    assert_eq!(parsed["recipes"][0]["name"], "a");
    assert_eq!(
        parsed["recipes"][0]["folds"].as_array().unwrap().len(),
        2
    );
    let auc = parsed["recipes"][0]["folds"][0]["test_auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));

    unsafe { gf_graph_free(g) };
}

#[test]
fn header_is_generated_with_guard_and_symbols() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/graphfactor.h");
    let text = std::fs::read_to_string(header).unwrap();
    assert!(text.contains("GRAPHFACTOR_H"));
    for symbol in [
        "gf_graph_load",
        "gf_graph_free",
        "gf_matrix_compute",
        "gf_embed",
        "gf_evaluate_json",
        "gf_last_error",
        "gf_string_free",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
    assert!(text.contains("typedef struct GfGraph GfGraph;"));
}
