#ifndef SIMPLEX_CONE_H
#define SIMPLEX_CONE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * No simplex has these squared lengths.
   */
  SC_STATUS_NOT_REALIZABLE = 3,
  /**
   * Iteration cap, failed line search or an ill-conditioned factorization.
   */
  SC_STATUS_NUMERICAL = 4,
  SC_STATUS_BUFFER_TOO_SMALL = 5,
  SC_STATUS_PANIC = 6,
} ScStatus;

typedef enum ScVerdict {
  SC_VERDICT_VALID = 0,
  SC_VERDICT_DEGENERATE = 1,
  SC_VERDICT_INVALID = 2,
} ScVerdict;

typedef enum ScObjectiveKind {
  /**
   * Sum of the logs of all k-face volumes.
   */
  SC_OBJECTIVE_KIND_LOG_PRODUCT_FACES = 0,
  /**
   * Sum of the k-th roots of all k-face volumes.
   */
  SC_OBJECTIVE_KIND_SUM_ROOT_FACES = 1,
} ScObjectiveKind;

/**
 * Opaque squared-edge-length vector of an n-simplex.
 */
typedef struct ScSimplex ScSimplex;

typedef struct ScValidity {
  enum ScVerdict verdict;
  double smallest_gram_eigenvalue;
  double largest_gram_eigenvalue;
  double threshold;
  bool triangle_inequalities_hold;
} ScValidity;

typedef struct ScOptimizeResult {
  size_t iterations;
  double objective;
  double regularity_deviation;
  bool converged;
} ScOptimizeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sc_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *sc_last_error(void);

/**
 * Number of squared lengths of an n-simplex, `(n + 1) n / 2`.
 */
size_t sc_edge_count(size_t n);

/**
 * Creates a simplex from `len` squared lengths in lexicographic edge order.
 *
 * # Safety
 * `s` must point to `len` readable doubles and `out` must be writable.
 */
enum ScStatus sc_simplex_new(size_t n, const double *s, size_t len, struct ScSimplex **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `h` must come from this library and not have been freed already.
 */
void sc_simplex_free(struct ScSimplex *h);

/**
 * Dimension n of the simplex, or 0 for a NULL handle.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t sc_simplex_dimension(const struct ScSimplex *h);

/**
 * Copies the squared lengths into `out` (at least `sc_edge_count(n)` entries).
 *
 * # Safety
 * `h` must be a live handle and `out` must hold `len` writable doubles.
 */
enum ScStatus sc_simplex_values(const struct ScSimplex *h, double *out, size_t len);

/**
 * Realizability verdict. `tol <= 0` selects the default tolerance.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum ScStatus sc_validate(const struct ScSimplex *h, double tol, struct ScValidity *out);

/**
 * n-volume; 0 for degenerate input, `SC_STATUS_NOT_REALIZABLE` for invalid.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum ScStatus sc_volume(const struct ScSimplex *h, double *out);

/**
 * Volume of the face spanned by `count` strictly increasing vertex indices.
 *
 * # Safety
 * `h` must be a live handle, `vertices` must hold `count` indices and `out`
 * must be writable.
 */
enum ScStatus sc_face_volume(const struct ScSimplex *h,
                             const size_t *vertices,
                             size_t count,
                             double *out);

/**
 * Vertex coordinates, row-major `(n + 1) × n`, vertex 0 at the origin.
 *
 * # Safety
 * `h` must be a live handle and `out` must hold `len` writable doubles.
 */
enum ScStatus sc_embed(const struct ScSimplex *h, double *out, size_t len);

/**
 * Dual Gram matrix (row-major `(n + 1) × (n + 1)`) and facet areas
 * (`n + 1` entries, `areas[i]` opposite vertex `i`).
 *
 * # Safety
 * `h` must be a live handle; `gstar` and `areas` must hold `gstar_len` and
 * `areas_len` writable doubles.
 */
enum ScStatus sc_dual_gram(const struct ScSimplex *h,
                           double *gstar,
                           size_t gstar_len,
                           double *areas,
                           size_t areas_len);

/**
 * `adj(G*)_ii / adj(G*)_jj`, the squared ratio of the facet areas.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum ScStatus sc_area_ratio(const struct ScSimplex *h, size_t i, size_t j, double *out);

/**
 * New handle holding `t1·a + t2·b`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum ScStatus sc_cone_combine(const struct ScSimplex *a,
                              const struct ScSimplex *b,
                              double t1,
                              double t2,
                              struct ScSimplex **out);

/**
 * Maximizes the chosen face functional over `Σ s_e = total` from a seeded
 * random start. On success `out_point` receives a new handle with the final
 * point.
 *
 * # Safety
 * `out_point` and `out_result` must be writable.
 */
enum ScStatus sc_maximize(size_t n,
                          double total,
                          enum ScObjectiveKind kind,
                          size_t k,
                          uint64_t seed,
                          struct ScSimplex **out_point,
                          struct ScOptimizeResult *out_result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIMPLEX_CONE_H */
