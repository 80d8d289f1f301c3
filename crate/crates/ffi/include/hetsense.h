#ifndef HETSENSE_H
#define HETSENSE_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Experiment selector for [`hs_run_experiment`].
 */
typedef enum {
  HS_EXPERIMENT_WEIGHTS = 0,
  HS_EXPERIMENT_BOUND = 1,
  HS_EXPERIMENT_MSE_SWEEP = 2,
  HS_EXPERIMENT_ROC = 3,
} HsExperiment;

/**
 * Recovery outcome, mirroring the library's solver status.
 */
typedef enum {
  HS_RECOVERY_STATUS_CONVERGED = 0,
  HS_RECOVERY_STATUS_MAX_ITERATIONS = 1,
  HS_RECOVERY_STATUS_INFEASIBLE = 2,
} HsRecoveryStatus;

/**
 * Result code of every call.
 */
typedef enum {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_DIMENSION_MISMATCH = 3,
  HS_STATUS_NOT_FOUND = 4,
  HS_STATUS_CONFIG = 5,
  HS_STATUS_IO = 6,
  HS_STATUS_PANIC = 7,
} HsStatus;

/**
 * Opaque occupancy profile.
 */
typedef struct HsProfile HsProfile;

/**
 * Opaque sensing system.
 */
typedef struct HsSensingSystem HsSensingSystem;

typedef struct {
  size_t max_iterations;
  double primal_tolerance;
  double dual_tolerance;
  double penalty;
  double feasibility_slack;
} HsSolverOptions;

typedef struct {
  double re;
  double im;
} HsComplex;

typedef struct {
  double residual_norm;
  size_t iterations;
  HsRecoveryStatus status;
} HsRecoveryInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * excluding the terminator, or 0 if no error has occurred.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t hs_last_error_message(char *buf, size_t len);

HsSolverOptions hs_solver_options_default(void);

/**
 * Profile from per-block probabilities.
 *
 * # Safety
 * `block_sizes` and `block_prob` must point to `blocks` values; `out_profile` must
 * be a valid pointer.
 */
HsStatus hs_profile_from_blocks(size_t n,
                                const size_t *block_sizes,
                                const double *block_prob,
                                size_t blocks,
                                HsProfile **out_profile);

/**
 * Profile from per-band probabilities.
 *
 * # Safety
 * `block_sizes` must point to `blocks` values, `band_prob` to `n` values;
 * `out_profile` must be a valid pointer.
 */
HsStatus hs_profile_from_bands(size_t n,
                               const size_t *block_sizes,
                               size_t blocks,
                               const double *band_prob,
                               HsProfile **out_profile);

/**
 * # Safety
 * `profile` must be null or a handle from `hs_profile_from_*` not yet freed.
 */
void hs_profile_free(HsProfile *profile);

/**
 * # Safety
 * `profile` must be a live handle; `out_mean` a valid pointer.
 */
HsStatus hs_profile_mean(const HsProfile *profile, double *out_mean);

/**
 * Writes the `blocks` block averages.
 *
 * # Safety
 * `profile` must be a live handle; `out_averages` must hold `blocks` values.
 */
HsStatus hs_profile_block_averages(const HsProfile *profile, double *out_averages, size_t blocks);

/**
 * Writes the `n + 1` entries of the occupied-band count PMF.
 *
 * # Safety
 * `profile` must be a live handle; `out_pmf` must hold `len` values.
 */
HsStatus hs_profile_pmf(const HsProfile *profile, double *out_pmf, size_t len);

/**
 * # Safety
 * `profile` must be a live handle; `out_bound` a valid pointer.
 */
HsStatus hs_profile_tail_bound(const HsProfile *profile, size_t k0, double *out_bound);

/**
 * # Safety
 * `profile` must be a live handle; `out_k0` a valid pointer.
 */
HsStatus hs_profile_select_sparsity(const HsProfile *profile, double alpha, size_t *out_k0);

/**
 * # Safety
 * `out_m` must be a valid pointer.
 */
HsStatus hs_measurement_count(size_t k0, size_t n, double c, size_t *out_m);

/**
 * # Safety
 * `out_prob` must be a valid pointer.
 */
HsStatus hs_block_inversion_probability(size_t n1,
                                        double q1,
                                        size_t n2,
                                        double q2,
                                        double *out_prob);

/**
 * Block weights from block averages.
 *
 * # Safety
 * `averages` and `out_weights` must each hold `blocks` values.
 */
HsStatus hs_compute_weights(const double *averages, size_t blocks, double *out_weights);

/**
 * Random `m × n` Bernoulli sensing system drawn from `seed`.
 *
 * # Safety
 * `out_system` must be a valid pointer.
 */
HsStatus hs_sensing_generate(size_t m, size_t n, uint64_t seed, HsSensingSystem **out_system);

/**
 * Sensing system from an explicit row-major `m × n` matrix `Ψ`.
 *
 * # Safety
 * `psi` must hold `m * n` values; `out_system` must be a valid pointer.
 */
HsStatus hs_sensing_from_psi(size_t m, size_t n, const double *psi, HsSensingSystem **out_system);

/**
 * # Safety
 * `system` must be null or a live handle.
 */
void hs_sensing_free(HsSensingSystem *system);

/**
 * # Safety
 * `system` must be a live handle; `out_m`, `out_n` valid pointers.
 */
HsStatus hs_sensing_dims(const HsSensingSystem *system, size_t *out_m, size_t *out_n);

/**
 * `y = A x`.
 *
 * # Safety
 * `x` must hold `n` values and `out_y` `m` values.
 */
HsStatus hs_sensing_apply(const HsSensingSystem *system,
                          const HsComplex *x,
                          size_t n,
                          HsComplex *out_y,
                          size_t m);

/**
 * Block-weighted ℓ1 recovery. `weights` and `block_sizes` hold one value
 * per block; `opts` may be null for defaults, `info` may be null.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
HsStatus hs_solve_weighted_l1(const HsSensingSystem *system,
                              const HsComplex *y,
                              size_t m,
                              const size_t *block_sizes,
                              const double *weights,
                              size_t blocks,
                              double epsilon,
                              const HsSolverOptions *opts,
                              HsComplex *out_x,
                              size_t n,
                              HsRecoveryInfo *info);

/**
 * Unweighted ℓ1 recovery.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
HsStatus hs_solve_l1(const HsSensingSystem *system,
                     const HsComplex *y,
                     size_t m,
                     double epsilon,
                     const HsSolverOptions *opts,
                     HsComplex *out_x,
                     size_t n,
                     HsRecoveryInfo *info);

/**
 * Orthogonal matching pursuit with at most `k_max` atoms.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
HsStatus hs_solve_omp(const HsSensingSystem *system,
                      const HsComplex *y,
                      size_t m,
                      size_t k_max,
                      double epsilon,
                      HsComplex *out_x,
                      size_t n,
                      HsRecoveryInfo *info);

/**
 * CoSaMP with target sparsity `k`.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
HsStatus hs_solve_cosamp(const HsSensingSystem *system,
                         const HsComplex *y,
                         size_t m,
                         size_t k,
                         double epsilon,
                         const HsSolverOptions *opts,
                         HsComplex *out_x,
                         size_t n,
                         HsRecoveryInfo *info);

/**
 * # Safety
 * `out_z` must be a valid pointer.
 */
HsStatus hs_inverse_q(double p, double *out_z);

/**
 * # Safety
 * `out_lambda` must be a valid pointer.
 */
HsStatus hs_detection_threshold(double noise_energy_mean,
                                size_t m,
                                size_t n,
                                double pf_target,
                                double *out_lambda);

/**
 * Runs an experiment from a configuration file and writes its CSV to
 * `out_path` plus the resolved configuration next to it. `seed` may be
 * null to keep the configured seed; `trials` of 0 keeps the configured
 * trial count.
 *
 * # Safety
 * `config_path` and `out_path` must be NUL-terminated strings; `seed`
 * must be null or valid.
 */
HsStatus hs_run_experiment(HsExperiment experiment,
                           const char *config_path,
                           const char *out_path,
                           const uint64_t *seed,
                           size_t trials);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HETSENSE_H */
