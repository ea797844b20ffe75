#ifndef AXIREG_H
#define AXIREG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AxiregStatus {
  AXIREG_STATUS_OK = 0,
  AXIREG_STATUS_NULL_POINTER = 1,
  AXIREG_STATUS_INVALID_ARGUMENT = 2,
  AXIREG_STATUS_CONFIG = 3,
  AXIREG_STATUS_NON_FINITE = 4,
  AXIREG_STATUS_ABORTED = 5,
  AXIREG_STATUS_IO = 6,
  AXIREG_STATUS_FORMAT = 7,
  AXIREG_STATUS_BUFFER_SIZE = 8,
  AXIREG_STATUS_INTERNAL = 9,
  AXIREG_STATUS_PANIC = 10,
} AxiregStatus;

typedef enum AxiregField {
  AXIREG_FIELD_U1 = 0,
  AXIREG_FIELD_OMEGA1 = 1,
  AXIREG_FIELD_PSI1 = 2,
} AxiregField;

/**
 * Opaque solver handle.
 */
typedef struct AxiregSolver AxiregSolver;

/**
 * One monitor row, same fields and order as the CSV columns.
 */
typedef struct AxiregRow {
  double t;
  double energy;
  double dissipation;
  double crit_a;
  double crit_b;
  double crit_a_int;
  double crit_b_int;
  double swirl_sup;
  double cfz_l2;
  double cfz_grad_int;
  double cfz_l4_int;
  double phi_l2;
  double gamma_l2;
  double om1_l2;
  double om1_grad_int;
  double u1_l4_int;
  double ualpha_s;
  double quartic_lhs;
  double quartic_rhs;
  double cfz_grad;
  double om1_grad;
  double u1_l4;
  double dissipation_int;
  double vr_grad;
  double vr_grad_43_int;
} AxiregRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next failing
 * call on the same thread.
 */
const char *axireg_last_error(void);

/**
 * NUL-terminated crate version.
 */
const char *axireg_version(void);

/**
 * Builds a solver from `key = value` configuration text.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AxiregStatus axireg_solver_new(const char *config, struct AxiregSolver **out);

/**
 * # Safety
 * `h` must come from [`axireg_solver_new`] and not be used afterwards. Null is ignored.
 */
void axireg_solver_free(struct AxiregSolver *h);

/**
 * Takes up to `max_steps` time steps, stopping early at `t_end`.
 * `steps_taken` may be null.
 *
 * # Safety
 * `h` must be a live handle.
 */
enum AxiregStatus axireg_solver_advance(struct AxiregSolver *h,
                                        size_t max_steps,
                                        size_t *steps_taken);

/**
 * Steps until `t_end`.
 *
 * # Safety
 * `h` must be a live handle.
 */
enum AxiregStatus axireg_solver_run(struct AxiregSolver *h);

/**
 * # Safety
 * `h` must be a live handle, `t` and `finished` valid pointers (`finished` may be null).
 */
enum AxiregStatus axireg_solver_time(const struct AxiregSolver *h, double *t, bool *finished);

/**
 * # Safety
 * `h` must be a live handle and `nr`, `nz` valid pointers.
 */
enum AxiregStatus axireg_solver_dims(const struct AxiregSolver *h, size_t *nr, size_t *nz);

/**
 * Copies one field into `buf`, which must hold exactly `nr * nz` values.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `len` writes.
 */
enum AxiregStatus axireg_solver_copy_field(const struct AxiregSolver *h,
                                           enum AxiregField field,
                                           double *buf,
                                           size_t len);

/**
 * # Safety
 * `h` must be a live handle and `count` a valid pointer.
 */
enum AxiregStatus axireg_solver_row_count(const struct AxiregSolver *h, size_t *count);

/**
 * Monitor row `index` (0 is the initial sample).
 *
 * # Safety
 * `h` must be a live handle and `row` a valid pointer.
 */
enum AxiregStatus axireg_solver_row(const struct AxiregSolver *h,
                                    size_t index,
                                    struct AxiregRow *row);

/**
 * # Safety
 * `h` must be a live handle and `row` a valid pointer.
 */
enum AxiregStatus axireg_solver_latest_row(const struct AxiregSolver *h, struct AxiregRow *row);

/**
 * # Safety
 * `h` must be a live handle and `path` a NUL-terminated string.
 */
enum AxiregStatus axireg_solver_write_snapshot(const struct AxiregSolver *h, const char *path);

/**
 * # Safety
 * `h` must be a live handle and `path` a NUL-terminated string.
 */
enum AxiregStatus axireg_solver_write_series(const struct AxiregSolver *h, const char *path);

/**
 * Solves `-(d2/dr2 + (3/r) d/dr + d2/dz2) psi1 = omega1` with `psi1 = 0` at
 * the wall. Both buffers hold `nr * nz` values.
 *
 * # Safety
 * `omega1` must be valid for `nr * nz` reads and `psi1` for as many writes.
 */
enum AxiregStatus axireg_solve_stream(double radius,
                                      double length,
                                      size_t nr,
                                      size_t nz,
                                      const double *omega1,
                                      double *psi1);

/**
 * `crit_a / crit_b` of the stream function generated by `omega1`.
 *
 * # Safety
 * `omega1` must be valid for `nr * nz` reads and `ratio` a valid pointer.
 */
enum AxiregStatus axireg_criteria_ratio(double radius,
                                        double length,
                                        size_t nr,
                                        size_t nz,
                                        const double *omega1,
                                        double *ratio);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AXIREG_H */
