#ifndef GRAPHFACTOR_H
#define GRAPHFACTOR_H

/* Generated by cbindgen from graphfactor-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  /**
   * Success.
   */
  GF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GF_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GF_STATUS_INVALID_UTF8 = 2,
  /**
   * The input file could not be read or an output could not be written.
   */
  GF_STATUS_IO = 3,
  /**
   * The input file is not a valid edge list.
   */
  GF_STATUS_PARSE = 4,
  /**
   * A parameter or token is out of range or unknown.
   */
  GF_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The computation failed; see gf_last_error.
   */
  GF_STATUS_RUNTIME = 6,
  /**
   * A panic was caught at the boundary; see gf_last_error.
   */
  GF_STATUS_PANIC = 7,
} GfStatus;

/**
 * Opaque graph handle.
 */
typedef struct GfGraph GfGraph;

/**
 * Opaque dense-matrix handle; also used for embeddings (rows = nodes,
 * cols = dimensions).
 */
typedef struct GfMatrix GfMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if the
 * last call succeeded. The pointer is valid until the next failing call
 * on the same thread; do not free it.
 */
const char *gf_last_error(void);

/**
 * Releases a string returned by this library.
 */
void gf_string_free(char *s);

/**
 * Loads an undirected graph from an edge-list file ('#' comments, one
 * "u v" pair per line). External ids are remapped to 0..n-1 by ascending
 * numeric value; self-loops and duplicate edges are dropped.
 */
GfStatus gf_graph_load(const char *path, GfGraph **out);

/**
 * Releases a graph handle.
 */
void gf_graph_free(GfGraph *g);

/**
 * Number of nodes; 0 for a null handle.
 */
uint64_t gf_graph_nodes(const GfGraph *g);

/**
 * Number of undirected edges; 0 for a null handle.
 */
uint64_t gf_graph_edges(const GfGraph *g);

/**
 * Volume (sum of degrees, twice the edge count); 0 for a null handle.
 */
uint64_t gf_graph_volume(const GfGraph *g);

/**
 * Computes one recipe matrix (token one of: a, sig_a, j, sig_j, q,
 * sig_q, trunc_log_q, sig_log_q) with window T and shift b. Pass
 * paper_literal_j = 0 for the canonical J summation range, nonzero for
 * the literal variant. mem_cap = 0 selects the default dense cap.
 */
GfStatus gf_matrix_compute(const GfGraph *g,
                           const char *recipe,
                           uint64_t window,
                           double shift,
                           int paper_literal_j,
                           uint64_t mem_cap,
                           GfMatrix **out);

/**
 * Releases a matrix handle.
 */
void gf_matrix_free(GfMatrix *m);

/**
 * Row count; 0 for a null handle.
 */
uint64_t gf_matrix_rows(const GfMatrix *m);

/**
 * Column count; 0 for a null handle.
 */
uint64_t gf_matrix_cols(const GfMatrix *m);

/**
 * Reads one entry.
 */
GfStatus gf_matrix_get(const GfMatrix *m, uint64_t row, uint64_t col, double *out);

/**
 * Borrowed pointer to the row-major entries (rows x cols doubles), valid
 * while the handle is alive; null for a null handle.
 */
const double *gf_matrix_data(const GfMatrix *m);

/**
 * Factorizes a matrix with the seeded randomized truncated SVD and
 * returns the embedding Y = U_d * sqrt(Sigma_d) as a (rows x dim) matrix
 * handle. Defaults used by the CLI: oversample 10, power_iters 7.
 */
GfStatus gf_embed(const GfMatrix *m,
                  uint64_t dim,
                  uint64_t oversample,
                  uint64_t power_iters,
                  uint64_t seed,
                  GfMatrix **out);

/**
 * Runs the k-fold link-prediction evaluation and returns the report as a
 * JSON string (schema: dataset, params, recipes with per-fold AUCs,
 * sigmoid effects, errors). recipes_csv is a comma-separated token list;
 * null or empty selects the full menu. The caller frees *out_json with
 * gf_string_free.
 */
GfStatus gf_evaluate_json(const GfGraph *g,
                          const char *dataset,
                          const char *recipes_csv,
                          uint64_t window,
                          double shift,
                          uint64_t dim,
                          uint64_t folds,
                          uint64_t seed,
                          int paper_literal_j,
                          char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHFACTOR_H */
