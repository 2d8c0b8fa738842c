#ifndef FRACLAB_H
#define FRACLAB_H

/* Auto-generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum FraclabStatus {
  FRACLAB_STATUS_OK = 0,
  FRACLAB_STATUS_NULL_POINTER = 1,
  FRACLAB_STATUS_INVALID_ARGUMENT = 2,
  FRACLAB_STATUS_HYPOTHESIS_VIOLATED = 3,
  FRACLAB_STATUS_NON_FINITE = 4,
  FRACLAB_STATUS_OVERFLOW = 5,
  FRACLAB_STATUS_DIVERGED = 6,
  FRACLAB_STATUS_IO_ERROR = 7,
  FRACLAB_STATUS_PANIC = 8,
} FraclabStatus;

/**
 * Orlicz gauge selector.
 */
typedef enum FraclabGauge {
  FRACLAB_GAUGE_EXP_LP = 0,
  FRACLAB_GAUGE_EXP_LP_REDUCED = 1,
  FRACLAB_GAUGE_POWER = 2,
} FraclabGauge;

/**
 * Terminal state of an evolution run.
 */
typedef enum FraclabOutcome {
  FRACLAB_OUTCOME_CONVERGED = 0,
  FRACLAB_OUTCOME_ITERATION_CAP = 1,
  FRACLAB_OUTCOME_DIVERGED = 2,
} FraclabOutcome;

/**
 * Opaque field handle.
 */
typedef struct FraclabField FraclabField;

/**
 * Opaque grid handle.
 */
typedef struct FraclabGrid FraclabGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a periodic grid on [-half_width, half_width)^n with
 * points_per_axis nodes per axis (a power of two, at least 8).
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum FraclabStatus fraclab_grid_new(uintptr_t n,
                                    double half_width,
                                    uintptr_t points_per_axis,
                                    struct FraclabGrid **out);

/**
 * Releases a grid handle; a null pointer is a no-op.
 *
 * # Safety
 * `grid` must be null or a pointer returned by `fraclab_grid_new`.
 */
void fraclab_grid_free(struct FraclabGrid *grid);

/**
 * Total node count N^n of the grid.
 *
 * # Safety
 * `grid` and `out` must be valid pointers.
 */
enum FraclabStatus fraclab_grid_node_count(const struct FraclabGrid *grid, uintptr_t *out);

/**
 * Wraps caller-provided values (row-major node order, length N^n) as a field.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum FraclabStatus fraclab_field_from_values(const struct FraclabGrid *grid,
                                             const double *values,
                                             uintptr_t len,
                                             struct FraclabField **out);

/**
 * Releases a field handle; a null pointer is a no-op.
 *
 * # Safety
 * `field` must be null or a pointer returned by this library.
 */
void fraclab_field_free(struct FraclabField *field);

/**
 * Copies the field's values into the caller's buffer of length `len` (= N^n).
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FraclabStatus fraclab_field_copy_values(const struct FraclabField *field,
                                             double *out,
                                             uintptr_t len);

/**
 * Discrete L^q norm; pass q = INFINITY for the sup norm.
 *
 * # Safety
 * `field` and `out` must be valid pointers.
 */
enum FraclabStatus fraclab_field_lq_norm(const struct FraclabField *field, double q, double *out);

/**
 * Luxemburg norm for the selected gauge with exponent p.
 *
 * # Safety
 * `field`, `out_norm` must be valid; `out_iterations` may be null.
 */
enum FraclabStatus fraclab_luxemburg_norm(const struct FraclabField *field,
                                          enum FraclabGauge gauge,
                                          double p,
                                          double tol,
                                          double *out_norm,
                                          uintptr_t *out_iterations);

/**
 * Applies e^{-t(-Delta)^{beta/2}} and returns a new field handle.
 *
 * # Safety
 * `field` and `out` must be valid pointers.
 */
enum FraclabStatus fraclab_apply_semigroup(const struct FraclabField *field,
                                           double beta,
                                           double t,
                                           struct FraclabField **out);

/**
 * Samples the real-space kernel S_beta(., t) on the grid (t > 0).
 *
 * # Safety
 * `grid` and `out` must be valid pointers.
 */
enum FraclabStatus fraclab_kernel_realspace(const struct FraclabGrid *grid,
                                            double beta,
                                            double t,
                                            struct FraclabField **out);

/**
 * Local existence time 1/(4 C e^{lambda (2K)^p}).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FraclabStatus fraclab_local_time_estimate(double k_norm,
                                               double m,
                                               double p,
                                               double lambda,
                                               double c,
                                               double *out);

/**
 * Decay exponent sigma = 1/(m-1) - n/(beta q).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FraclabStatus fraclab_decay_exponent(uintptr_t n,
                                          double beta,
                                          double m,
                                          double q,
                                          double *out);

/**
 * Classifies beta against n(p-1)/p: 0 = below, 1 = equal, 2 = above.
 * The admissible q interval is written to (out_q_lo, out_q_hi); the upper
 * endpoint is +infinity when unconstrained.
 *
 * # Safety
 * All out pointers must be valid.
 */
enum FraclabStatus fraclab_regime_classify(uintptr_t n,
                                           double beta,
                                           double p,
                                           double m,
                                           int32_t *out_regime,
                                           double *out_q_lo,
                                           double *out_q_hi);

/**
 * Runs the first-order exponential integrator for
 * u_t + (-Delta)^{beta/2} u = sign |u|^{m-1} u e^{lambda |u|^p}
 * from the given field, writing the final state, outcome, and (on
 * divergence) the crossing time.
 *
 * # Safety
 * `field`, `out_final`, and `out_outcome` must be valid; `out_t_max` may be
 * null.
 */
enum FraclabStatus fraclab_etd_evolve(const struct FraclabField *field,
                                      double m,
                                      double p,
                                      double lambda,
                                      double sign,
                                      double beta,
                                      double dt,
                                      uintptr_t steps,
                                      double blow_threshold,
                                      struct FraclabField **out_final,
                                      enum FraclabOutcome *out_outcome,
                                      double *out_t_max);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACLAB_H */
