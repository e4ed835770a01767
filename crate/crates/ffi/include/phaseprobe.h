#ifndef PHASEPROBE_H
#define PHASEPROBE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_NORMALIZATION = 2,
  PP_STATUS_CONTRACT = 3,
  PP_STATUS_EMPTY_REQUEST = 4,
  PP_STATUS_TRUNCATION = 5,
  PP_STATUS_MOMENT = 6,
  PP_STATUS_SINGULARITY = 7,
  PP_STATUS_PRECONDITION = 8,
  PP_STATUS_SUPPORT = 9,
  PP_STATUS_RANGE = 10,
  PP_STATUS_INFEASIBLE = 11,
  PP_STATUS_CONVERGENCE = 12,
  PP_STATUS_INVALID = 13,
  PP_STATUS_BUFFER_TOO_SMALL = 14,
  PP_STATUS_INTERNAL = 99,
} PpStatus;

/**
 * Opaque photon-number state.
 */
typedef struct PpFockVector PpFockVector;

/**
 * Opaque result of [`pp_minimize_tau`].
 */
typedef struct PpTauResult PpTauResult;

/**
 * Scalar part of a [`PpTauResult`].
 */
typedef struct PpTauSummary {
  double energy_bound;
  double tau;
  double e2tau;
  /**
   * Lagrange multiplier; NaN when `has_multiplier` is false.
   */
  double multiplier;
  bool has_multiplier;
  size_t n_trunc;
  /**
   * 0 for the even sector, 1 for the odd one.
   */
  uint32_t sector;
  double stationarity_residual;
} PpTauSummary;

typedef struct PpFisherReport {
  double j;
  /**
   * `2/J`; +inf when `mcrb_infinite` is set.
   */
  double mcrb;
  bool mcrb_infinite;
  double mean_photon;
} PpFisherReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread (empty if none).
 */
const char *pp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pp_version(void);

/**
 * Builds a state from `len` amplitudes. `im` may be NULL for real input.
 * The state is not normalized.
 *
 * # Safety
 * `re` (and `im` when non-NULL) must point to `len` readable doubles.
 */
enum PpStatus pp_fock_new(const double *re,
                          const double *im,
                          size_t len,
                          struct PpFockVector **out_state);

/**
 * Unit-norm copy of `state`.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum PpStatus pp_fock_normalize(const struct PpFockVector *state, struct PpFockVector **out_state);

/**
 * # Safety
 * `state` must be NULL or a handle not freed before.
 */
void pp_fock_free(struct PpFockVector *state);

/**
 * Truncation dimension of `state`.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum PpStatus pp_fock_len(const struct PpFockVector *state, size_t *out_len);

/**
 * Copies the amplitudes into `re`/`im` (each `capacity` long; `im` may be
 * NULL). Fails with `BUFFER_TOO_SMALL` when `capacity < len`.
 *
 * # Safety
 * `state` must be a live handle; buffers must hold `capacity` doubles.
 */
enum PpStatus pp_fock_amplitudes(const struct PpFockVector *state,
                                 double *re,
                                 double *im,
                                 size_t capacity);

/**
 * # Safety
 * `state` must be a live handle.
 */
enum PpStatus pp_mean_photon(const struct PpFockVector *state, double *out_value);

/**
 * Average error `2 sin²` of the covariant measurement.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum PpStatus pp_covariant_error(const struct PpFockVector *state, double *out_value);

/**
 * `|⟨a|b⟩|²`.
 *
 * # Safety
 * `a` and `b` must be live handles.
 */
enum PpStatus pp_fidelity(const struct PpFockVector *a,
                          const struct PpFockVector *b,
                          double *out_value);

/**
 * Minimal covariant error under `⟨n̂⟩ ≤ energy_bound` in `n_trunc` levels.
 *
 * # Safety
 * `out_result` must be writable.
 */
enum PpStatus pp_minimize_tau(double energy_bound, size_t n_trunc, struct PpTauResult **out_result);

/**
 * # Safety
 * `result` must be a live handle.
 */
enum PpStatus pp_tau_summary(const struct PpTauResult *result, struct PpTauSummary *out_summary);

/**
 * Copy of the optimal state as a new handle.
 *
 * # Safety
 * `result` must be a live handle.
 */
enum PpStatus pp_tau_optimizer(const struct PpTauResult *result, struct PpFockVector **out_state);

/**
 * # Safety
 * `result` must be NULL or a handle not freed before.
 */
void pp_tau_free(struct PpTauResult *result);

/**
 * Squeezed three-level probe at squeezing `r`; `dim = 0` picks the
 * default truncation.
 *
 * # Safety
 * `out_state` must be writable.
 */
enum PpStatus pp_psi74_state(double r, size_t dim, struct PpFockVector **out_state);

/**
 * Heralded amplitudes for squeezing `q` and four displacements.
 * Writes the five unnormalized amplitudes to `phi_out`, the normalizer to
 * `normalizer_out` and, if `out_state` is non-NULL, the normalized state.
 *
 * # Safety
 * `betas` must hold 4 doubles and `phi_out` room for 5.
 */
enum PpStatus pp_herald(double q,
                        const double *betas,
                        double *phi_out,
                        double *normalizer_out,
                        struct PpFockVector **out_state);

/**
 * Fidelity of the heralded state with a normalized `target`.
 *
 * # Safety
 * `betas` must hold 4 doubles; `target` must be a live handle.
 */
enum PpStatus pp_herald_fidelity(double q,
                                 const double *betas,
                                 const struct PpFockVector *target,
                                 double *out_value);

/**
 * SLD Fisher information `4 Var(n̂)` and the bound `2/J`.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum PpStatus pp_sld_fisher(const struct PpFockVector *state, struct PpFisherReport *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHASEPROBE_H */
