#ifndef PANELCOUNT_H
#define PANELCOUNT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every entry point.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_BUFFER_LENGTH = 2,
  PC_STATUS_INVALID_INPUT = 3,
  PC_STATUS_VALIDATION = 4,
  PC_STATUS_DOMAIN = 5,
  PC_STATUS_NUMERICAL = 6,
  PC_STATUS_DIVERGENCE = 7,
  PC_STATUS_NON_IDENTIFIABLE = 8,
  PC_STATUS_STAGNATION = 9,
  PC_STATUS_INFERENCE = 10,
  PC_STATUS_IO = 11,
  PC_STATUS_PANIC = 12,
} PcStatus;

/**
 * Estimator selector.
 */
typedef enum PcMethod {
  PC_METHOD_MPLE = 0,
  PC_METHOD_MLE = 1,
} PcMethod;

/**
 * Opaque panel count dataset.
 */
typedef struct PcDataset PcDataset;

/**
 * Opaque fitted model.
 */
typedef struct PcFit PcFit;

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pc_version(void);

/**
 * Reads a CSV file (header `subject_id,time,count,z1,...,zd`).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_dataset_from_csv_path(const char *path, bool increments, struct PcDataset **out);

/**
 * Parses CSV text held in memory.
 *
 * # Safety
 * `buf` must point to `len` readable bytes and `out` be a valid pointer.
 */
enum PcStatus pc_dataset_from_csv_buffer(const uint8_t *buf,
                                         size_t len,
                                         bool increments,
                                         struct PcDataset **out);

/**
 * Releases a dataset. Null is ignored.
 *
 * # Safety
 * `data` must come from a `pc_dataset_*` constructor and not be used again.
 */
void pc_dataset_free(struct PcDataset *data);

/**
 * Number of subjects, or 0 for null.
 *
 * # Safety
 * `data` must be null or a live handle.
 */
size_t pc_dataset_len(const struct PcDataset *data);

/**
 * Number of covariates, or 0 for null.
 *
 * # Safety
 * `data` must be null or a live handle.
 */
size_t pc_dataset_dim(const struct PcDataset *data);

/**
 * Fits the model with default settings and stopping tolerance `eta`.
 *
 * # Safety
 * `data` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_fit(const struct PcDataset *data,
                     enum PcMethod method,
                     double eta,
                     struct PcFit **out);

/**
 * Releases a fit. Null is ignored.
 *
 * # Safety
 * `fit` must come from [`pc_fit`] and not be used again.
 */
void pc_fit_free(struct PcFit *fit);

/**
 * Number of regression coefficients, or 0 for null.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
size_t pc_fit_dim(const struct PcFit *fit);

/**
 * Copies β̂ into `beta[0..len]`; `len` must equal [`pc_fit_dim`].
 *
 * # Safety
 * `fit` must be a live handle and `beta` point to `len` writable doubles.
 */
enum PcStatus pc_fit_beta(const struct PcFit *fit, double *beta, size_t len);

/**
 * Maximized log-likelihood and convergence flag.
 *
 * # Safety
 * `fit` must be a live handle; `loglik` and `converged` may be null.
 */
enum PcStatus pc_fit_summary(const struct PcFit *fit, double *loglik, bool *converged);

/**
 * Number of jump points of the baseline estimate, or 0 for null.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
size_t pc_fit_lambda_len(const struct PcFit *fit);

/**
 * Copies the baseline step function: value `values[i]` holds on
 * `[times[i], times[i+1])`. `len` must equal [`pc_fit_lambda_len`].
 *
 * # Safety
 * `fit` must be a live handle; `times` and `values` must each point to
 * `len` writable doubles.
 */
enum PcStatus pc_fit_lambda(const struct PcFit *fit, double *times, double *values, size_t len);

/**
 * Nonparametric bootstrap standard errors of β̂ written to `se[0..len]`.
 * `len` must equal the dataset dimension.
 *
 * # Safety
 * `data` must be a live handle and `se` point to `len` writable doubles.
 */
enum PcStatus pc_bootstrap_se(const struct PcDataset *data,
                              enum PcMethod method,
                              size_t replicates,
                              uint64_t seed,
                              double eta,
                              double *se,
                              size_t len);

/**
 * Wald statistics `z = estimate / se` and two-sided normal p-values.
 *
 * # Safety
 * `estimates` and `se` must point to `len` readable doubles; `zstat` and
 * `pvalue` to `len` writable doubles.
 */
enum PcStatus pc_wald(const double *estimates,
                      const double *se,
                      size_t len,
                      double *zstat,
                      double *pvalue);

/**
 * Analytic asymptotic covariances of reference scenario 1 or 2 at the
 * three-component `beta0`, written row-major into two 9-element buffers.
 *
 * # Safety
 * `beta0` must point to 3 readable doubles; `sigma_pseudo` and `sigma`
 * to 9 writable doubles each.
 */
enum PcStatus pc_asymptotic_cov(uint8_t scenario,
                                const double *beta0,
                                double *sigma_pseudo,
                                double *sigma);

#endif  /* PANELCOUNT_H */
