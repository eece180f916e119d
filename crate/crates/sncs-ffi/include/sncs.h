/* C interface for the sncs library (nonlinear supercoherent states). */

#ifndef SNCS_H
#define SNCS_H

/* Generated by cbindgen from sncs-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Deformation of the annihilation operator.
 */
typedef enum SncsKind {
  /**
   * f(N) = 1.
   */
  SNCS_KIND_LINEAR = 0,
  /**
   * f(N) = N + 1.
   */
  SNCS_KIND_SHIFTED_NUMBER = 1,
  /**
   * f(N) = N.
   */
  SNCS_KIND_NUMBER = 2,
} SncsKind;

/**
 * Status codes returned by every fallible call.
 */
typedef enum SncsStatus {
  SNCS_STATUS_OK = 0,
  SNCS_STATUS_INVALID_ARGUMENT = 1,
  SNCS_STATUS_CONVERGENCE = 2,
  SNCS_STATUS_TRUNCATION = 3,
  SNCS_STATUS_WRONG_FAMILY = 4,
  SNCS_STATUS_NO_EIGENVECTOR = 5,
  SNCS_STATUS_ZERO_NORM = 6,
  SNCS_STATUS_IO = 7,
  SNCS_STATUS_INTERNAL = 8,
} SncsStatus;

/**
 * An explicitly built (normalized) supercoherent superposition state,
 * remembering what it was built from.
 */
typedef struct SncsState SncsState;

/**
 * Quadrature means, variances and the Heisenberg product
 * (hbar = m = omega = 1).
 */
typedef struct SncsUncertainty {
  double mean_x;
  double mean_p;
  double mean_x2;
  double mean_p2;
  double var_x;
  double var_p;
  double product;
} SncsUncertainty;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *sncs_status_message(enum SncsStatus status);

/**
 * The library's default Fock truncation.
 */
size_t sncs_default_dim(void);

/**
 * Generalized hypergeometric 0F2(b1, b2; x) for complex x.
 *
 * # Safety
 * `out_re` and `out_im` must be valid writable pointers.
 */
enum SncsStatus sncs_f02(double b1,
                         double b2,
                         double x_re,
                         double x_im,
                         double *out_re,
                         double *out_im);

/**
 * Closed-form quadrature moments of one coherent state.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum SncsStatus sncs_scalar_moments(enum SncsKind kind,
                                    double alpha_re,
                                    double alpha_im,
                                    struct SncsUncertainty *out);

/**
 * Closed-form uncertainties of the theta-family superposition
 * cos(eta) |+> + exp(i lambda) sin(eta) |-> (generic family only).
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum SncsStatus sncs_spinor_moments(enum SncsKind kind,
                                    double theta,
                                    double eig_re,
                                    double eig_im,
                                    double eta,
                                    double lambda,
                                    struct SncsUncertainty *out);

/**
 * Closed-form geometric phase of the theta-family superposition.
 *
 * # Safety
 * `out_beta` must be a valid writable pointer.
 */
enum SncsStatus sncs_geometric_phase(enum SncsKind kind,
                                     double theta,
                                     double eig_re,
                                     double eig_im,
                                     double eta,
                                     double lambda,
                                     double omega,
                                     double *out_beta);

/**
 * Build the normalized theta-family superposition state in a truncated
 * Fock space; pass dim = 0 for the library default.
 *
 * # Safety
 * `out` must be a valid writable pointer; the returned handle must be
 * released with `sncs_state_free`.
 */
enum SncsStatus sncs_state_new(enum SncsKind kind,
                               double theta,
                               double eig_re,
                               double eig_im,
                               double eta,
                               double lambda,
                               size_t dim,
                               struct SncsState **out);

/**
 * Release a state handle. Null is a no-op.
 *
 * # Safety
 * `state` must be null or a pointer obtained from `sncs_state_new` that
 * has not been freed before.
 */
void sncs_state_free(struct SncsState *state);

/**
 * Fock truncation of a built state.
 *
 * # Safety
 * `state` must be a live handle from `sncs_state_new`.
 */
size_t sncs_state_dim(const struct SncsState *state);

/**
 * Read one spinor coefficient; component 0 is the upper block, 1 the lower.
 *
 * # Safety
 * `state` must be a live handle; `out_re`/`out_im` must be writable.
 */
enum SncsStatus sncs_state_coeff(const struct SncsState *state,
                                 uint32_t component,
                                 size_t n,
                                 double *out_re,
                                 double *out_im);

/**
 * Quadrature moments of a built state through the truncated-matrix path.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum SncsStatus sncs_state_moments(const struct SncsState *state, struct SncsUncertainty *out);

/**
 * Relative eigen-residual of a built state under its own annihilation
 * operator, with the top two Fock levels excluded.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum SncsStatus sncs_state_eigen_residual(const struct SncsState *state, double *out);

/**
 * Geometric phase of a built state via the Hamiltonian expectation.
 *
 * # Safety
 * `state` must be a live handle; `out_beta` must be writable.
 */
enum SncsStatus sncs_state_geometric_phase(const struct SncsState *state,
                                           double omega,
                                           double *out_beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNCS_H */
