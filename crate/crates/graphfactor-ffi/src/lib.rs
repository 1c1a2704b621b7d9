//! C ABI over the graphfactor pipeline: load a graph, compute a recipe
//! matrix, factor it into embeddings, or run the full link-prediction
//! evaluation and get the report as JSON.
//!
//! Conventions:
//! - Handles (`GfGraph`, `GfMatrix`) are opaque; free each with its
//!   matching `gf_*_free`. A null handle is safe to free.
//! - Fallible calls return a `GfStatus` and write results through out
//!   pointers, which are only written on `GfStatus_OK`.
//! - `gf_last_error` returns a thread-local message for the most recent
//!   failure on the calling thread, valid until the next failing call.
//! - Strings returned through out pointers are owned by the caller and
//!   must be released with `gf_string_free`.
//!
//! The C header is generated into `include/graphfactor.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use graphfactor::dense::DenseMatrix;
use graphfactor::error::Error;
use graphfactor::graph::{load_edge_list, Graph};
use graphfactor::linkpred::{evaluate, EvalOptions};
use graphfactor::matrices::{HyperParams, JIndex, DEFAULT_DENSE_CAP};
use graphfactor::svd::{embed, truncated_svd};
use graphfactor::transforms::{recipe_matrix, recipe_menu, MatrixRecipe};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input file could not be read or an output could not be written.
    Io = 3,
    /// The input file is not a valid edge list.
    Parse = 4,
    /// A parameter or token is out of range or unknown.
    InvalidArgument = 5,
    /// The computation failed; see gf_last_error.
    Runtime = 6,
    /// A panic was caught at the boundary; see gf_last_error.
    Panic = 7,
}

/// Opaque graph handle.
pub struct GfGraph {
    inner: Graph,
}

/// Opaque dense-matrix handle; also used for embeddings (rows = nodes,
/// cols = dimensions).
pub struct GfMatrix {
    inner: DenseMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    let c = CString::new(sanitized).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_for(e: &Error) -> GfStatus {
    match e {
        Error::Io { .. } => GfStatus::Io,
        Error::Parse { .. } => GfStatus::Parse,
        Error::UnknownRecipe { .. } | Error::InvalidRecipe(_) | Error::InvalidParam(_) => {
            GfStatus::InvalidArgument
        }
        _ => GfStatus::Runtime,
    }
}

fn fail(e: &Error) -> GfStatus {
    set_last_error(&e.to_string());
    status_for(e)
}

fn null_argument() -> GfStatus {
    set_last_error("null pointer argument");
    GfStatus::NullArgument
}

fn invalid(msg: &str) -> GfStatus {
    set_last_error(msg);
    GfStatus::InvalidArgument
}

fn guarded(f: impl FnOnce() -> GfStatus) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = if let Some(s) = payload.downcast_ref::<&str>() {
                (*s).to_string()
            } else if let Some(s) = payload.downcast_ref::<String>() {
                s.clone()
            } else {
                "panic at the C boundary".to_string()
            };
            set_last_error(&msg);
            GfStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, GfStatus> {
    match unsafe { CStr::from_ptr(p) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_last_error("string argument is not valid UTF-8");
            Err(GfStatus::InvalidUtf8)
        }
    }
}

fn j_index_from_flag(paper_literal_j: c_int) -> JIndex {
    if paper_literal_j != 0 {
        JIndex::PaperLiteral
    } else {
        JIndex::Canonical
    }
}

fn cap_or_default(mem_cap: u64) -> usize {
    if mem_cap == 0 {
        DEFAULT_DENSE_CAP
    } else {
        mem_cap as usize
    }
}

/// Message for the most recent failure on this thread, or null if the
/// last call succeeded. The pointer is valid until the next failing call
/// on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Loads an undirected graph from an edge-list file ('#' comments, one
/// "u v" pair per line). External ids are remapped to 0..n-1 by ascending
/// numeric value; self-loops and duplicate edges are dropped.
#[no_mangle]
pub unsafe extern "C" fn gf_graph_load(path: *const c_char, out: *mut *mut GfGraph) -> GfStatus {
    guarded(|| {
        clear_last_error();
        if path.is_null() || out.is_null() {
            return null_argument();
        }
        let path = match unsafe { cstr(path) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match load_edge_list(Path::new(path)) {
            Ok((graph, _, _)) => {
                unsafe { *out = Box::into_raw(Box::new(GfGraph { inner: graph })) };
                GfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a graph handle.
#[no_mangle]
pub unsafe extern "C" fn gf_graph_free(g: *mut GfGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of nodes; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_graph_nodes(g: *const GfGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.n() as u64
}

/// Number of undirected edges; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_graph_edges(g: *const GfGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.n_edges() as u64
}

/// Volume (sum of degrees, twice the edge count); 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_graph_volume(g: *const GfGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.volume() as u64
}

/// Computes one recipe matrix (token one of: a, sig_a, j, sig_j, q,
/// sig_q, trunc_log_q, sig_log_q) with window T and shift b. Pass
/// paper_literal_j = 0 for the canonical J summation range, nonzero for
/// the literal variant. mem_cap = 0 selects the default dense cap.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_compute(
    g: *const GfGraph,
    recipe: *const c_char,
    window: u64,
    shift: f64,
    paper_literal_j: c_int,
    mem_cap: u64,
    out: *mut *mut GfMatrix,
) -> GfStatus {
    guarded(|| {
        clear_last_error();
        if g.is_null() || recipe.is_null() || out.is_null() {
            return null_argument();
        }
        let token = match unsafe { cstr(recipe) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let recipe = match MatrixRecipe::from_token(token) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let graph = &unsafe { &*g }.inner;
        let h = HyperParams {
            window: window as usize,
            shift,
            rank: 1,
        };
        if let Err(e) = h.validate(graph.n().max(1)) {
            return fail(&e);
        }
        match recipe_matrix(
            graph,
            &recipe,
            &h,
            j_index_from_flag(paper_literal_j),
            cap_or_default(mem_cap),
        ) {
            Ok(m) => {
                unsafe { *out = Box::into_raw(Box::new(GfMatrix { inner: m })) };
                GfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a matrix handle.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_free(m: *mut GfMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Row count; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_rows(m: *const GfMatrix) -> u64 {
    if m.is_null() {
        return 0;
    }
    unsafe { &*m }.inner.n_rows() as u64
}

/// Column count; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_cols(m: *const GfMatrix) -> u64 {
    if m.is_null() {
        return 0;
    }
    unsafe { &*m }.inner.n_cols() as u64
}

/// Reads one entry.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_get(
    m: *const GfMatrix,
    row: u64,
    col: u64,
    out: *mut f64,
) -> GfStatus {
    guarded(|| {
        clear_last_error();
        if m.is_null() || out.is_null() {
            return null_argument();
        }
        let matrix = &unsafe { &*m }.inner;
        if row as usize >= matrix.n_rows() || col as usize >= matrix.n_cols() {
            return invalid(&format!(
                "index ({row}, {col}) out of range for a {}x{} matrix",
                matrix.n_rows(),
                matrix.n_cols()
            ));
        }
        unsafe { *out = matrix.get(row as usize, col as usize) };
        GfStatus::Ok
    })
}

/// Borrowed pointer to the row-major entries (rows x cols doubles), valid
/// while the handle is alive; null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_data(m: *const GfMatrix) -> *const f64 {
    if m.is_null() {
        return std::ptr::null();
    }
    unsafe { &*m }.inner.data().as_ptr()
}

/// Factorizes a matrix with the seeded randomized truncated SVD and
/// returns the embedding Y = U_d * sqrt(Sigma_d) as a (rows x dim) matrix
/// handle. Defaults used by the CLI: oversample 10, power_iters 7.
#[no_mangle]
pub unsafe extern "C" fn gf_embed(
    m: *const GfMatrix,
    dim: u64,
    oversample: u64,
    power_iters: u64,
    seed: u64,
    out: *mut *mut GfMatrix,
) -> GfStatus {
    guarded(|| {
        clear_last_error();
        if m.is_null() || out.is_null() {
            return null_argument();
        }
        let matrix = &unsafe { &*m }.inner;
        match truncated_svd(
            matrix,
            dim as usize,
            oversample as usize,
            power_iters as usize,
            seed,
        ) {
            Ok(svd) => {
                let y = embed(&svd);
                unsafe { *out = Box::into_raw(Box::new(GfMatrix { inner: y })) };
                GfStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Runs the k-fold link-prediction evaluation and returns the report as a
/// JSON string (schema: dataset, params, recipes with per-fold AUCs,
/// sigmoid effects, errors). recipes_csv is a comma-separated token list;
/// null or empty selects the full menu. The caller frees *out_json with
/// gf_string_free.
#[no_mangle]
pub unsafe extern "C" fn gf_evaluate_json(
    g: *const GfGraph,
    dataset: *const c_char,
    recipes_csv: *const c_char,
    window: u64,
    shift: f64,
    dim: u64,
    folds: u64,
    seed: u64,
    paper_literal_j: c_int,
    out_json: *mut *mut c_char,
) -> GfStatus {
    guarded(|| {
        clear_last_error();
        if g.is_null() || dataset.is_null() || out_json.is_null() {
            return null_argument();
        }
        let dataset = match unsafe { cstr(dataset) } {
            Ok(s) => s.to_string(),
            Err(status) => return status,
        };
        let recipes = if recipes_csv.is_null() {
            recipe_menu()
        } else {
            let list = match unsafe { cstr(recipes_csv) } {
                Ok(s) => s,
                Err(status) => return status,
            };
            if list.trim().is_empty() {
                recipe_menu()
            } else {
                let mut parsed = Vec::new();
                for token in list.split(',') {
                    match MatrixRecipe::from_token(token.trim()) {
                        Ok(r) => parsed.push(r),
                        Err(e) => return fail(&e),
                    }
                }
                parsed
            }
        };
        let graph = &unsafe { &*g }.inner;
        let h = HyperParams {
            window: window as usize,
            shift,
            rank: dim as usize,
        };
        let opts = EvalOptions {
            dataset,
            j_index: j_index_from_flag(paper_literal_j),
            cap: DEFAULT_DENSE_CAP,
            oversample: graphfactor::svd::DEFAULT_OVERSAMPLE,
            power_iters: graphfactor::svd::DEFAULT_POWER_ITERS,
        };
        let report = match evaluate(graph, &recipes, &h, folds as usize, seed, &opts) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        let json = match report.to_json_string() {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        match CString::new(json) {
            Ok(c) => {
                unsafe { *out_json = c.into_raw() };
                GfStatus::Ok
            }
            Err(_) => {
                set_last_error("report JSON contained an interior NUL byte");
                GfStatus::Runtime
            }
        }
    })
}
