#ifndef MATCHSTREAM_H
#define MATCHSTREAM_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; nonzero values match the CLI exit codes.
 */
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  /**
   * I/O failure or internal error.
   */
  MS_STATUS_FAIL = 1,
  /**
   * Invalid parameter or malformed input.
   */
  MS_STATUS_PARAM = 2,
  /**
   * Memory budget violated.
   */
  MS_STATUS_BUDGET = 3,
  /**
   * Instance exceeds the oracle budget.
   */
  MS_STATUS_OVERSIZE = 4,
} MsStatus;

/**
 * Opaque graph handle.
 */
typedef struct MsGraph MsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never null.
 */
const char *ms_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ms_version(void);

/**
 * Parse a graph from its text serialization ("n m" header, then one
 * "u v w" line per edge).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On Ok, `*out` owns a handle to release with `ms_graph_free`.
 */
enum MsStatus ms_graph_parse(const char *text, struct MsGraph **out);

/**
 * Load a graph from a file in the text serialization.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On Ok, `*out` owns a handle to release with `ms_graph_free`.
 */
enum MsStatus ms_graph_load(const char *path, struct MsGraph **out);

/**
 * Build a graph from parallel edge arrays of length `m`.
 *
 * # Safety
 * `us`, `vs`, `ws` must point to `m` readable elements (or `m` may be 0);
 * `out` must be a valid pointer. On Ok, `*out` owns a handle to release
 * with `ms_graph_free`.
 */
enum MsStatus ms_graph_from_edges(uint32_t n,
                                  const uint32_t *us,
                                  const uint32_t *vs,
                                  const int64_t *ws,
                                  uintptr_t m,
                                  struct MsGraph **out);

/**
 * Release a handle from ms_graph_parse/load/from_edges. Null is a no-op.
 *
 * # Safety
 * `g` must be a handle returned by this library, not yet freed.
 */
void ms_graph_free(struct MsGraph *g);

/**
 * Number of vertices.
 *
 * # Safety
 * `g` must be a live handle from this library.
 */
uint32_t ms_graph_n(const struct MsGraph *g);

/**
 * Number of edges.
 *
 * # Safety
 * `g` must be a live handle from this library.
 */
uint64_t ms_graph_m(const struct MsGraph *g);

/**
 * Exact maximum-weight matching weight (desk-scale sizes only).
 *
 * # Safety
 * `g` must be a live handle; `out_weight` must be a valid pointer.
 */
enum MsStatus ms_oracle_mwm(const struct MsGraph *g, int64_t *out_weight);

/**
 * Single-pass unweighted pipeline on a seeded random arrival order.
 * `p` in (0,1) is the greedy prefix fraction.
 *
 * # Safety
 * `g` must be a live handle; `out_size` and `out_peak_edges` must be valid
 * pointers.
 */
enum MsStatus ms_run_unweighted(const struct MsGraph *g,
                                uint64_t seed,
                                double p,
                                uint64_t *out_size,
                                uint64_t *out_peak_edges);

/**
 * Single-pass weighted random-arrival pipeline with default parameters.
 *
 * # Safety
 * `g` must be a live handle; `out_weight` and `out_peak_edges` must be
 * valid pointers.
 */
enum MsStatus ms_run_random_arrival(const struct MsGraph *g,
                                    uint64_t seed,
                                    int64_t *out_weight,
                                    uint64_t *out_peak_edges);

/**
 * Multi-pass solver from the empty matching under the relaxed defaults for
 * `eps`; `iters` bounds improvement rounds (0 keeps the default).
 *
 * # Safety
 * `g` must be a live handle; `out_weight` must be a valid pointer.
 */
enum MsStatus ms_run_multipass(const struct MsGraph *g,
                               uint64_t seed,
                               double eps,
                               uint64_t iters,
                               int64_t *out_weight);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MATCHSTREAM_H */
