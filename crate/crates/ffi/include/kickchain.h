/* Generated by cbindgen from crates/ffi; do not edit. */

#ifndef KICKCHAIN_H
#define KICKCHAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Propagator selection for [`kc_floquet_new`].
 */
typedef enum {
  /**
   * Dense up to the dense size limit, matrix-free beyond.
   */
  KC_PATH_AUTO = 0,
  KC_PATH_DENSE = 1,
  KC_PATH_MATRIX_FREE = 2,
} KcPath;

typedef enum {
  KC_OK = 0,
  KC_ERR_IO = 1,
  KC_ERR_CONFIG = 2,
  KC_ERR_NUMERIC = 3,
  KC_ERR_NULL_POINTER = 4,
  KC_ERR_INVALID_ARGUMENT = 5,
  KC_ERR_INTERNAL = 6,
} KcStatus;

typedef struct KcFloquet KcFloquet;

typedef struct KcSpectrum KcSpectrum;

typedef struct KcState KcState;

typedef struct {
  size_t l;
  double j;
  double omega;
  double k;
  double t;
  double j0_offset;
} KcChainConfig;

typedef struct {
  double ipr;
  double staggered_mag;
  /**
   * Mean entropy of sites `1..=entropy_block` over eigenstates.
   */
  double entropy;
  size_t entropy_block;
  double gap_ratio;
} KcDiagnostics;

typedef struct {
  double beta_eff;
  double epsilon_p;
  double residual;
  /**
   * Nonzero when the target energy sits at a spectral edge.
   */
  int32_t saturated;
} KcThermalFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *kc_last_error_message(void);

const char *kc_version(void);

/**
 * `Omega = 1`, `T = 1/16`, `J = K = j0_offset = 0`.
 */
KcStatus kc_config_default(size_t l, KcChainConfig *out);

KcStatus kc_floquet_new(const KcChainConfig *config, KcPath path, KcFloquet **out);

void kc_floquet_free(KcFloquet *u);

/**
 * Replaces `*state` by `U_F^n_kicks state`.
 */
KcStatus kc_floquet_apply(const KcFloquet *u, KcState *state, size_t n_kicks);

/**
 * Preset names: `neel`, `vacuum`, `domain_wall`, `single:<j>`, `bell_pair:<i>,<j>`,
 * `global_bell`, `pattern:<udud...>`.
 */
KcStatus kc_state_from_preset(size_t l, const char *preset, KcState **out);

/**
 * `len` doubles of interleaved amplitudes, `len = 2 * 2^l`; must be normalized.
 */
KcStatus kc_state_from_amplitudes(size_t l, const double *amps, size_t len, KcState **out);

void kc_state_free(KcState *s);

/**
 * Hilbert-space dimension `2^L`, or 0 for a null handle.
 */
size_t kc_state_dim(const KcState *s);

/**
 * Copies the amplitudes into `out` (`len = 2 * dim` doubles).
 */
KcStatus kc_state_amplitudes(const KcState *s, double *out, size_t len);

/**
 * `<sigma^z_site>` with `site` in `1..=L`.
 */
KcStatus kc_state_sigma_z(const KcState *s, size_t site, double *out);

/**
 * Full eigendecomposition; needs an operator on the dense path.
 */
KcStatus kc_spectrum_new(const KcFloquet *u, KcSpectrum **out);

void kc_spectrum_free(KcSpectrum *s);

size_t kc_spectrum_dim(const KcSpectrum *s);

/**
 * Ascending eigenphases in `(-pi, pi]` with `U_F |a> = exp(-i theta_a) |a>`.
 */
KcStatus kc_spectrum_eigenphases(const KcSpectrum *s, double *out, size_t len);

KcStatus kc_spectrum_diagnostics(const KcSpectrum *s, const KcState *psi0, KcDiagnostics *out);

KcStatus kc_spectrum_thermal_fit(const KcSpectrum *s, const KcState *psi0, KcThermalFit *out);

/**
 * `m pi / (T (site - j0)^2)`.
 */
KcStatus kc_dd_kick_for_site(const KcChainConfig *config, size_t site, uint32_t m, double *out);

/**
 * `pi / (T floor((L-1)/n_d)^2)`.
 */
KcStatus kc_dd_kick_for_count(size_t l, size_t n_d, double t, double *out);

/**
 * `Omega T / pi`, or NaN for a null config.
 */
double kc_dd_rabi_frequency(const KcChainConfig *config);

/**
 * Writes up to `cap` decoupled sites (1-based) to `sites` and their total
 * number to `count`; `sites` may be null when `cap` is 0.
 */
KcStatus kc_dd_decoupled_sites(const KcChainConfig *config,
                               double k,
                               double phase_tol,
                               size_t *sites,
                               size_t cap,
                               size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KICKCHAIN_H */
