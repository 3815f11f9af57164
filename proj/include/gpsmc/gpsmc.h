#ifndef GPSMC_H
#define GPSMC_H

/* C interface to the gpsmc library: Gaussian-process regression with
 * hyperparameters marginalized by a sequential Monte Carlo sampler.
 *
 * Every function returns a status code (gpsmc_status); out-parameters are
 * written only on GPSMC_OK. gpsmc_last_error() describes the most recent
 * failure on the calling thread. Handles are opaque and owned by the caller
 * through the matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gpsmc_status {
  GPSMC_OK = 0,
  GPSMC_ERR_CONFIG = 2,  /* bad input: config, dimensions, files */
  GPSMC_ERR_NUMERIC = 3, /* numerical breakdown */
  GPSMC_ERR_INVALID = 4  /* null handle or argument misuse */
} gpsmc_status;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
const char* gpsmc_version(void);

/* Message for the calling thread's most recent error. Static storage per
 * thread; overwritten by the next failing call. */
const char* gpsmc_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct gpsmc_dataset gpsmc_dataset;

/* X is row-major n x d; y has n entries. The data is copied. */
int gpsmc_dataset_create(const double* X, const double* y, int n, int d,
                         gpsmc_dataset** out);

/* Loads a numeric CSV. input_cols lists 0-based column indices (n_inputs of
 * them); target_col selects the regression target. A leading non-numeric
 * line is treated as a header. */
int gpsmc_dataset_from_csv(const char* path, const int* input_cols, int n_inputs,
                           int target_col, gpsmc_dataset** out);

int gpsmc_dataset_size(const gpsmc_dataset* data, int* n, int* d);
void gpsmc_dataset_free(gpsmc_dataset* data);

/* ---- models ------------------------------------------------------------ */

/* A model bundles the kernel ("se_iso" or "se_ard"), the mean function
 * ("zero", "constant" or "linear") and one prior per hyperparameter
 * coordinate. Coordinates are ordered: kernel log length-scales, kernel
 * log signal variance, mean parameters, log noise variance. */

typedef struct gpsmc_model gpsmc_model;

int gpsmc_model_create(const char* kernel, const char* mean, int input_dim,
                       gpsmc_model** out);

/* Number of hyperparameter coordinates. */
int gpsmc_model_dim(const gpsmc_model* model, int* dim);

/* Writes the coordinate's name into buf (NUL-terminated, truncated to
 * buf_len). */
int gpsmc_model_coordinate_name(const gpsmc_model* model, int coordinate, char* buf,
                                size_t buf_len);

/* Prior kinds: "gaussian_on_log" (a, b = mean, std of the stored log
 * coordinate), "gaussian" (natural coordinate), "uniform_on_log" (a, b =
 * bounds), "fixed" (a = pinned value, b ignored). Every coordinate needs a
 * prior before sampling. */
int gpsmc_model_set_prior(gpsmc_model* model, int coordinate, const char* kind, double a,
                          double b);

void gpsmc_model_free(gpsmc_model* model);

/* ---- likelihood -------------------------------------------------------- */

/* Log marginal likelihood of theta (length = gpsmc_model_dim). */
int gpsmc_log_marginal_likelihood(const gpsmc_model* model, const gpsmc_dataset* data,
                                  const double* theta, double* out);

/* ---- posterior sampling ------------------------------------------------ */

typedef struct gpsmc_samples gpsmc_samples;

/* Data-tempered SMC over the hyperparameter posterior: num_particles
 * particles, the data split into num_batches batches, mh_moves
 * Metropolis-Hastings steps per stage. */
int gpsmc_sample_smc(const gpsmc_model* model, const gpsmc_dataset* data, int num_particles,
                     int num_batches, int mh_moves, double ess_threshold, uint64_t seed,
                     gpsmc_samples** out);

/* Prior importance sampling with n draws. */
int gpsmc_sample_prior_is(const gpsmc_model* model, const gpsmc_dataset* data, int n,
                          uint64_t seed, gpsmc_samples** out);

int gpsmc_samples_count(const gpsmc_samples* samples, int* count);
int gpsmc_samples_dim(const gpsmc_samples* samples, int* dim);

/* Copies particle i's hyperparameters (theta, length dim) and weight. Either
 * destination may be NULL to skip it. */
int gpsmc_samples_get(const gpsmc_samples* samples, int i, double* theta, double* weight);

/* Likelihood evaluations spent producing the ensemble. */
int gpsmc_samples_evals(const gpsmc_samples* samples, int64_t* evals);

void gpsmc_samples_free(gpsmc_samples* samples);

/* ---- prediction -------------------------------------------------------- */

typedef struct gpsmc_mixture gpsmc_mixture;

/* Weighted predictive mixture at n_star query points (Xstar row-major
 * n_star x d). */
int gpsmc_predict(const gpsmc_model* model, const gpsmc_dataset* data,
                  const gpsmc_samples* samples, const double* Xstar, int n_star,
                  gpsmc_mixture** out);

/* Moment summary: mean and variance per query point (either may be NULL). */
int gpsmc_mixture_moments(const gpsmc_mixture* mixture, double* mean, double* var);

/* Joint log density of y (length = query count) under the mixture. */
int gpsmc_mixture_logpdf(const gpsmc_mixture* mixture, const double* y, double* out);

int gpsmc_mixture_size(const gpsmc_mixture* mixture, int* n_points, int* n_components);
void gpsmc_mixture_free(gpsmc_mixture* mixture);

/* ---- command runner ----------------------------------------------------- */

/* Executes a JSON run configuration (the CLI's engine): runs the configured
 * task and writes its artifacts. task, when non-NULL, must match the
 * document's task (the CLI passes its verb here). preset may be NULL or
 * "sarcos" / "changepoint"; out_dir and seed, when non-NULL, override the
 * document. On success *out_dir_used (if non-NULL) receives the artifact
 * directory; free it with gpsmc_string_free. */
int gpsmc_run_command(const char* config_json, const char* task, const char* preset,
                      const char* out_dir, const uint64_t* seed, char** out_dir_used);

void gpsmc_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GPSMC_H */
