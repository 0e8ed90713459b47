#ifndef TORIC_KAHLER_H
#define TORIC_KAHLER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TkStatus {
  TK_STATUS_OK = 0,
  TK_STATUS_NULL_POINTER = 1,
  TK_STATUS_INVALID_ARGUMENT = 2,
  TK_STATUS_DOMAIN = 3,
  TK_STATUS_NON_ADMISSIBLE = 4,
  TK_STATUS_SINGULAR = 5,
  TK_STATUS_ACCURACY = 6,
  TK_STATUS_BUFFER_TOO_SMALL = 7,
  TK_STATUS_PANIC = 8,
} TkStatus;

/**
 * Opaque t-potential.
 */
typedef struct TkTPotential TkTPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *tk_status_message(enum TkStatus status);

/**
 * Copies the last error message of this thread, NUL-terminated and truncated
 * to `len` bytes. Returns the full message length excluding the NUL, or 0
 * when there is no error recorded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tk_last_error_message(char *buf, size_t len);

/**
 * `F'' ≡ 0` on `(0, ∞)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum TkStatus tk_potential_flat(struct TkTPotential **out);

/**
 * `F'' = 1/(1 - t)` on `(0, 1)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum TkStatus tk_potential_fubini_study(struct TkTPotential **out);

/**
 * `F'' = 1/(t(t - 1))` on `(1, ∞)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum TkStatus tk_potential_generalized_burns(struct TkTPotential **out);

/**
 * The scalar-flat blow-up potential in dimension `n ≥ 2`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum TkStatus tk_potential_burns_simanca(size_t n, struct TkTPotential **out);

/**
 * `F'' = (At + B)/(t(tⁿ - At - B))` on `(0, ∞)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum TkStatus tk_potential_scalar_flat_family(size_t n,
                                              double a,
                                              double b,
                                              struct TkTPotential **out);

/**
 * # Safety
 * `p` must be null or a live handle; it is invalid afterwards.
 */
void tk_potential_free(struct TkTPotential *p);

/**
 * Writes the Taylor coefficients `c_0..c_order` of `F''` at `t`.
 *
 * # Safety
 * `p` must be a live handle and `coeffs` must hold `len` doubles.
 */
enum TkStatus tk_potential_f2_jet(const struct TkTPotential *p,
                                  double t,
                                  size_t order,
                                  double *coeffs,
                                  size_t len);

/**
 * `S = t^{1-n}(t^{n+1}F''/(1 + tF''))''` in dimension `n`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TkStatus tk_scalar_curvature_reduced(const struct TkTPotential *p,
                                          size_t n,
                                          double t,
                                          double *out);

/**
 * Hessian `G`, its inverse and `det G⁻¹` of `g = ½(Σ xᵢ ln xᵢ + F(t))` at `x`.
 * `g` and `g_inv` are row-major `n × n`; any of the three outputs may be null.
 *
 * # Safety
 * `p` must be a live handle, `x` must hold `n` doubles and non-null outputs
 * must hold `n * n` (or one) doubles.
 */
enum TkStatus tk_hessian_t_family(const struct TkTPotential *p,
                                  const double *x,
                                  size_t n,
                                  double *g,
                                  double *g_inv,
                                  double *det_g_inv);

/**
 * Boundary matching on the blow-up polytope: `A`, `B` and the coefficients of
 * `Q(t) = (tⁿ - At - B)/(t - 1)` in ascending degree. `q_written` receives the
 * number of coefficients, also when `q_len` is too small.
 *
 * # Safety
 * Non-null pointers must be writable; `q` must hold `q_len` doubles.
 */
enum TkStatus tk_boundary_match(size_t n,
                                double *a,
                                double *b,
                                double *q,
                                size_t q_len,
                                size_t *q_written);

/**
 * `δ(t) = 2ⁿ t⁻ⁿ Q(t)` for the matched coefficients.
 *
 * # Safety
 * `out` must be writable.
 */
enum TkStatus tk_boundary_delta(size_t n, double t, double *out);

/**
 * Fitted log-log slope of the Burns–Simanca deviation from the flat metric.
 *
 * # Safety
 * `out` must be writable.
 */
enum TkStatus tk_decay_slope(size_t n, double u_min, double u_max, size_t samples, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORIC_KAHLER_H */
