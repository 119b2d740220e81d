/* C ABI for the sixwave six-wave kinetic equation solvers. */

#ifndef SIXWAVE_H
#define SIXWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SixwaveStatus {
  SixwaveStatus_Ok = 0,
  // Invalid argument or configuration.
  SixwaveStatus_InvalidArgument = 1,
  // Data outside a smallness regime required by the requested solver.
  SixwaveStatus_OutsideRegime = 2,
  // Iteration failed to converge or to certify its ordering.
  SixwaveStatus_NoConvergence = 3,
  // A required pointer was null.
  SixwaveStatus_NullPointer = 4,
  // Internal panic; the handle states are unchanged.
  SixwaveStatus_Internal = 5,
} SixwaveStatus;

// Opaque field handle; values live on the solver grid it was created with.
typedef struct SixwaveField SixwaveField;

// Opaque solver handle: weight parameters plus discretization.
typedef struct SixwaveSolver SixwaveSolver;

// Smallness thresholds; `r_p_lo`/`r_p_hi` are NaN when `has_r_p` is 0.
typedef struct SixwaveThresholds {
  double c_d;
  double c1beta;
  double r_e;
  double r_ks;
  double r_s;
  double r_p_lo;
  double r_p_hi;
  int32_t has_r_p;
  int32_t nonneg_regime;
} SixwaveThresholds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the most recent error message on this thread into `buf`
// (NUL-terminated, truncated to `len`). Returns the full message length.
//
// # Safety
// `buf` must point to `len` writable bytes, or be null (query mode).
uintptr_t sixwave_last_error_message(char *buf, uintptr_t len);

// Fills `out` with the smallness thresholds for the given weights.
//
// # Safety
// `out` must point to a writable `SixwaveThresholds`.
enum SixwaveStatus sixwave_thresholds(double alpha,
                                      double beta,
                                      double eps_tail,
                                      struct SixwaveThresholds *out);

// Creates a solver. The time grid is `nt` uniform nodes on
// [`t_min`, `t_max`], which must contain 0 as a node. Returns null on
// invalid parameters (see `sixwave_last_error_message`).
struct SixwaveSolver *sixwave_solver_new(double alpha,
                                         double beta,
                                         double eps_tail,
                                         uintptr_t nx,
                                         uintptr_t nv,
                                         uintptr_t n_theta,
                                         double t_min,
                                         double t_max,
                                         uintptr_t nt,
                                         double picard_tol,
                                         uintptr_t max_iters);

// Frees a solver handle. Null is ignored.
//
// # Safety
// `solver` must be a pointer from `sixwave_solver_new`, not yet freed.
void sixwave_solver_free(struct SixwaveSolver *solver);

// Number of space nodes of the solver grid.
//
// # Safety
// `solver` must be a live solver handle.
uintptr_t sixwave_solver_nx(const struct SixwaveSolver *solver);

// Number of velocity nodes of the solver grid.
//
// # Safety
// `solver` must be a live solver handle.
uintptr_t sixwave_solver_nv(const struct SixwaveSolver *solver);

// Creates the Maxwellian scaled to weighted norm `scale` on the solver
// grid. Returns null on error.
//
// # Safety
// `solver` must be a live solver handle.
struct SixwaveField *sixwave_field_maxwellian(const struct SixwaveSolver *solver, double scale);

// Creates a field from `nx * nv` row-major values (space outermost) on the
// solver grid. Returns null on error.
//
// # Safety
// `solver` must be a live solver handle and `values` must point to `len`
// readable doubles.
struct SixwaveField *sixwave_field_from_values(const struct SixwaveSolver *solver,
                                               const double *values,
                                               uintptr_t len);

// Copies the `nx * nv` row-major values of a field into `out`.
//
// # Safety
// `field` must be a live field handle and `out` must point to `len`
// writable doubles.
enum SixwaveStatus sixwave_field_values(const struct SixwaveField *field,
                                        double *out,
                                        uintptr_t len);

// Weighted sup-norm of a field under the solver's weights.
//
// # Safety
// `solver` and `field` must be live handles; `out` must be writable.
enum SixwaveStatus sixwave_field_norm(const struct SixwaveSolver *solver,
                                      const struct SixwaveField *field,
                                      double *out);

// Frees a field handle. Null is ignored.
//
// # Safety
// `field` must be a pointer from a field constructor, not yet freed.
void sixwave_field_free(struct SixwaveField *field);

// Solves the Cauchy problem by Picard iteration. On success stores the
// transported solution at the final time node in `*out_final` (caller
// frees) and the last residual in `*out_residual` (may be null).
//
// # Safety
// `solver` and `f0` must be live handles; `out_final` must be writable.
enum SixwaveStatus sixwave_picard_solve(const struct SixwaveSolver *solver,
                                        const struct SixwaveField *f0,
                                        struct SixwaveField **out_final,
                                        double *out_residual);

// Solves by the monotone bracketing scheme. Stores the limit at the final
// time node in `*out_final` and the last bracket gap in `*out_gap` (may be
// null).
//
// # Safety
// `solver` and `f0` must be live handles; `out_final` must be writable.
enum SixwaveStatus sixwave_ks_solve(const struct SixwaveSolver *solver,
                                    const struct SixwaveField *f0,
                                    struct SixwaveField **out_final,
                                    double *out_gap);

// Computes the forward (`direction > 0`) or backward (`direction < 0`)
// scattering state. `tol <= 0` selects the default tolerance. Stores the
// state in `*out_state` and the settled horizon in `*out_tail_time` (may be
// null).
//
// # Safety
// `solver` and `f0` must be live handles; `out_state` must be writable.
enum SixwaveStatus sixwave_scatter(const struct SixwaveSolver *solver,
                                   const struct SixwaveField *f0,
                                   int32_t direction,
                                   double tol,
                                   struct SixwaveField **out_state,
                                   double *out_tail_time);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIXWAVE_H */
