#ifndef FREETIME_H
#define FREETIME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of the C interface.
 */
typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_ARGUMENT = 2,
  FT_STATUS_CONFIG = 3,
  FT_STATUS_NUMERICAL = 4,
  FT_STATUS_IO = 5,
  FT_STATUS_PANIC = 6,
} FtStatus;

/**
 * A built model together with its solver settings.
 */
typedef struct FtProblem FtProblem;

/**
 * Outcome of [`ft_solve`].
 */
typedef struct FtReport FtReport;

/**
 * Scalar results of a solve. `lambda_max` is NaN when no second-order check
 * was run.
 */
typedef struct FtSummary {
  double tau_star;
  double j_star;
  double grad_norm;
  double grad_tau;
  double lambda_max;
  bool converged;
  bool bb_exhausted;
  size_t bb_iterations;
  size_t newton_iterations;
  size_t n_steps;
  size_t control_dim;
} FtSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ft_last_error(void);

/**
 * Builds a model with its reference settings, e.g. `"lotka-volterra"`.
 *
 * # Safety
 * `model_id` must be a NUL-terminated string and `out` a writable pointer.
 */
enum FtStatus ft_problem_new(const char *model_id, struct FtProblem **out);

/**
 * Builds a problem from a run configuration in TOML.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum FtStatus ft_problem_from_toml(const char *toml, struct FtProblem **out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `problem` must come from this library and not be used afterwards.
 */
void ft_problem_free(struct FtProblem *problem);

/**
 * State and control dimensions, horizon and current number of steps.
 *
 * # Safety
 * `problem` must be a live handle; output pointers may be null.
 */
enum FtStatus ft_problem_dims(const struct FtProblem *problem,
                              size_t *state_dim,
                              size_t *control_dim,
                              double *horizon,
                              size_t *n_steps);

/**
 * Sets the number of time steps (even, at least 2).
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum FtStatus ft_problem_set_n_steps(struct FtProblem *problem, size_t n_steps);

/**
 * Sets the initial free time; NaN restores the model default.
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum FtStatus ft_problem_set_tau0(struct FtProblem *problem, double tau0);

/**
 * Objective `J(u, tau)` on the problem's grid. `u` holds
 * `(n_steps + 1) * control_dim` values.
 *
 * # Safety
 * `problem` must be a live handle, `u` readable for `u_len` values and
 * `objective` writable.
 */
enum FtStatus ft_problem_evaluate(const struct FtProblem *problem,
                                  const double *u,
                                  size_t u_len,
                                  double tau,
                                  double *objective);

/**
 * Reduced gradient: `grad_u` receives `u_len` Riesz-mapped values and
 * `grad_tau` the free-time component. `objective` may be null.
 *
 * # Safety
 * As for [`ft_problem_evaluate`]; `grad_u` must be writable for `u_len`
 * values and `grad_tau` writable.
 */
enum FtStatus ft_problem_gradient(const struct FtProblem *problem,
                                  const double *u,
                                  size_t u_len,
                                  double tau,
                                  double *grad_u,
                                  double *grad_tau,
                                  double *objective);

/**
 * Runs the optimiser from zero control. Reaching the iteration limit is not
 * an error; check `converged` in the summary.
 *
 * # Safety
 * `problem` must be a live handle and `out` writable.
 */
enum FtStatus ft_solve(const struct FtProblem *problem, struct FtReport **out);

/**
 * Scalar results of a solve.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum FtStatus ft_report_summary(const struct FtReport *report, struct FtSummary *out);

/**
 * Copies the optimal control into `buf`. `needed` receives the full length
 * `(n_steps + 1) * control_dim`; a short buffer gives
 * [`FtStatus::InvalidArgument`] and leaves `buf` untouched.
 *
 * # Safety
 * `report` must be a live handle, `buf` writable for `len` values (or null
 * with `len == 0`) and `needed` writable or null.
 */
enum FtStatus ft_report_control(const struct FtReport *report,
                                double *buf,
                                size_t len,
                                size_t *needed);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void ft_report_free(struct FtReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREETIME_H */
