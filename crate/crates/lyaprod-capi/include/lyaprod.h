#ifndef LYAPROD_H
#define LYAPROD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Degeneracy verdict codes for `lyap_classify`.
 */
enum LyapForm
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  NotApplicable = 0,
  FormI = 1,
  FormII = 2,
  FormIII = 3,
  Nondegenerate = 4,
};
#ifndef __cplusplus
typedef int32_t LyapForm;
#endif // __cplusplus

/**
 * Result of every call. Zero is success; everything else leaves the
 * out-pointers untouched.
 */
enum LyapStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  Ok = 0,
  /**
   * A required pointer argument was null.
   */
  NullPointer = 1,
  /**
   * Parameters outside the model (validation failed).
   */
  InvalidParams = 2,
  /**
   * The operation does not apply to this distribution family.
   */
  Unsupported = 3,
  /**
   * Quadrature failed to reach its tolerance within budget.
   */
  Nonconvergence = 4,
  /**
   * Zero-product retry cap exhausted while sampling.
   */
  DegenerateSample = 5,
  /**
   * Internal panic caught at the boundary; report a bug.
   */
  Panic = 6,
};
#ifndef __cplusplus
typedef int32_t LyapStatus;
#endif // __cplusplus

/**
 * Opaque distribution handle.
 */
typedef struct LyapDist LyapDist;

/**
 * Moment table from one Monte Carlo path, mirroring the library's block
 * estimate. `stderr_sigma2` is NaN when the path is too short for batching.
 */
typedef struct LyapMoments {
  double lambda_hat;
  double m2_hat;
  double c1_hat;
  double sigma2_hat;
  uint64_t n_samples;
  double stderr_lambda;
  double stderr_sigma2;
} LyapMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Two atoms: `a` with probability `p`, `b` with probability `1 - p`.
 */
LyapStatus lyap_dist_binary(double a, double b, double p, struct LyapDist **out);

/**
 * Uniform on `[lo, hi]`; requires `lo <= 0 < hi`.
 */
LyapStatus lyap_dist_uniform(double lo, double hi, struct LyapDist **out);

/**
 * Exponential with the given rate.
 */
LyapStatus lyap_dist_exponential(double rate, struct LyapDist **out);

/**
 * Double exponential with the given scale.
 */
LyapStatus lyap_dist_laplace(double scale, struct LyapDist **out);

/**
 * Finite support: `len` atoms with `len` matching probability weights.
 */
LyapStatus lyap_dist_atoms(const double *atoms,
                           const double *weights,
                           uintptr_t len,
                           struct LyapDist **out);

/**
 * Releases a handle; null is a no-op. Handles must be freed exactly once.
 */
void lyap_dist_free(struct LyapDist *dist);

/**
 * Writes a new handle for the entrywise-scaled law `c * X` to `out`.
 */
LyapStatus lyap_dist_scale(const struct LyapDist *dist, double c, struct LyapDist **out);

/**
 * Exact growth rate.
 */
LyapStatus lyap_lambda_closed(const struct LyapDist *dist, double *out);

/**
 * Exact fluctuation variance. `out_has_value` receives 0 when the family has
 * no closed variance (general uniform); `out_value` is written only when it
 * receives 1.
 */
LyapStatus lyap_sigma2_closed(const struct LyapDist *dist,
                              double *out_value,
                              int32_t *out_has_value);

/**
 * Monte Carlo growth rate from one path of `n` entries: point estimate and
 * a dependence-aware standard error.
 */
LyapStatus lyap_lambda_estimate(const struct LyapDist *dist,
                                uint64_t n,
                                uint64_t seed,
                                double *out_lambda,
                                double *out_stderr);

/**
 * Full Monte Carlo moment table from one path of `n` entries.
 */
LyapStatus lyap_sigma2_estimate(const struct LyapDist *dist,
                                uint64_t n,
                                uint64_t seed,
                                struct LyapMoments *out);

/**
 * Growth rate by adaptive quadrature (continuous families only).
 */
LyapStatus lyap_lambda_quadrature(const struct LyapDist *dist,
                                  double abs_tol,
                                  double rel_tol,
                                  double *out_value,
                                  double *out_error_bound);

/**
 * Fluctuation variance by adaptive quadrature (continuous families only).
 */
LyapStatus lyap_sigma2_quadrature(const struct LyapDist *dist,
                                  double abs_tol,
                                  double rel_tol,
                                  double *out_value,
                                  double *out_error_bound);

/**
 * Degeneracy verdict with the given relative tolerance on the atom ratio.
 */
LyapStatus lyap_classify(const struct LyapDist *dist, double rtol, LyapForm *out_form);

/**
 * `log ||Y(xs[len-1]) ... Y(xs[0])||` via the closed product form; writes
 * `-INFINITY` when the product is the zero matrix.
 */
LyapStatus lyap_log_norm_closed(const double *xs, uintptr_t len, double *out);

/**
 * Same quantity by explicit matrix multiplication.
 */
LyapStatus lyap_log_norm_direct(const double *xs, uintptr_t len, double *out);

/**
 * Library version as a static null-terminated string.
 */
const char *lyap_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LYAPROD_H */
