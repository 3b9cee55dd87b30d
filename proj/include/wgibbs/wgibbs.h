#ifndef WGIBBS_WGIBBS_H
#define WGIBBS_WGIBBS_H

/* C interface to the wgibbs sampler library.
 *
 * Every fallible call returns a wg_status; on failure a description is
 * available from wg_last_error() until the next call on the same thread.
 * Objects are opaque handles released with the matching *_free function.
 * Variable indices are zero-based. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WGIBBS_BUILDING_LIBRARY)
#    define WG_API __declspec(dllexport)
#  else
#    define WG_API __declspec(dllimport)
#  endif
#else
#  define WG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum wg_status {
  WG_OK = 0,
  WG_ERR_INVALID = 1,
  WG_ERR_CONFIG = 2,
  WG_ERR_IO = 3,
  WG_ERR_NUMERIC = 4,
  WG_ERR_INTERNAL = 5
} wg_status;

typedef struct wg_config wg_config;
typedef struct wg_model wg_model;
typedef struct wg_scheduler wg_scheduler;
typedef struct wg_trace wg_trace;

/* Receives one line of progress or validation output (no trailing newline). */
typedef void (*wg_log_fn)(const char* line, void* user);

WG_API const char* wg_version(void);
WG_API const char* wg_last_error(void);
WG_API void wg_string_free(char* text);

/* ---- experiment configs ---- */
WG_API wg_status wg_config_load(const char* path, wg_config** out);
WG_API wg_status wg_config_parse(const char* text, wg_config** out);
WG_API wg_status wg_config_default(const char* kind, wg_config** out);
/* key is "section.key" or an unambiguous bare key. */
WG_API wg_status wg_config_set(wg_config* config, const char* key, const char* value);
/* Current value as text; release with wg_string_free. */
WG_API wg_status wg_config_get(const wg_config* config, const char* key, char** out);
/* Canonical text; release with wg_string_free. */
WG_API wg_status wg_config_serialize(const wg_config* config, char** out);
WG_API void wg_config_free(wg_config* config);

/* Runs the experiment and writes its output tree. For kind=validate the
 * per-trial lines go to `log` and WG_ERR_NUMERIC signals a failed check. */
WG_API wg_status wg_experiment_run(const wg_config* config, wg_log_fn log, void* user);

/* Joins a metric across scheduler output directories into CSV text
 * (release with wg_string_free). metric may be NULL for the default. */
WG_API wg_status wg_compare(const char* const* directories, size_t count, const char* metric, char** out_csv);

typedef struct wg_validation_summary {
  size_t theorem_trials;
  double max_stationarity_residual;
  size_t lemma_trials;
  double max_weight_error;
  double max_objective_relative_error;
  int passed;
} wg_validation_summary;

/* Returns WG_ERR_NUMERIC when any check exceeds its tolerance. */
WG_API wg_status wg_validate(size_t theorem_trials, size_t lemma_trials, uint64_t seed, wg_log_fn log,
                             void* user, wg_validation_summary* out);

/* ---- weights ---- */
/* q_i = (sqrt(d_hat_i) + lambda) / sum_j (sqrt(d_hat_j) + lambda) into q_out[n]. */
WG_API wg_status wg_compute_weights(const double* d_hat, size_t n, double lambda, double* q_out);

/* ---- models ---- */
/* Row-major d x d covariance. */
WG_API wg_status wg_model_gaussian_create(const double* mean, const double* covariance, size_t d, wg_model** out);
/* Covariance lambda_cov * I + epsilon * Y Y^T with Y ~ N(0,1)^{d x r} drawn from seed. */
WG_API wg_status wg_model_gaussian_random(size_t d, size_t r, double epsilon, double lambda_cov, uint64_t seed,
                                          wg_model** out);
/* Row-major observed image of height x width. */
WG_API wg_status wg_model_ising_create(const double* observed, size_t height, size_t width, double coupling,
                                       double sigma, wg_model** out);
WG_API size_t wg_model_dimension(const wg_model* model);
WG_API void wg_model_free(wg_model* model);

/* ---- schedulers ---- */
typedef struct wg_weighted_options {
  uint64_t update_period;         /* steps between refreshes; 0 = dimension */
  double lambda;                  /* absolute regularisation; < 0 = relative */
  double relative_lambda;         /* factor on mean sqrt(d_hat) */
  int adapt_after_burn_in;
  double forgetting;              /* 1 = full history */
} wg_weighted_options;

WG_API void wg_weighted_options_default(wg_weighted_options* options);
/* name: "systematic", "random" or "weighted"; options may be NULL. */
WG_API wg_status wg_scheduler_create(const char* name, const wg_weighted_options* options, wg_scheduler** out);
WG_API void wg_scheduler_free(wg_scheduler* scheduler);

/* ---- chains ---- */
typedef struct wg_chain_options {
  uint64_t total_iterations; /* single-variable steps */
  uint64_t burn_in;
  uint64_t seed;
  uint64_t thinning;
  uint64_t initial_sweeps;
} wg_chain_options;

WG_API void wg_chain_options_default(wg_chain_options* options);
/* initial_state has wg_model_dimension(model) entries. The scheduler is reset. */
WG_API wg_status wg_chain_run(wg_model* model, wg_scheduler* scheduler, const wg_chain_options* options,
                              const double* initial_state, wg_trace** out);

WG_API size_t wg_trace_rows(const wg_trace* trace);
WG_API size_t wg_trace_dimension(const wg_trace* trace);
WG_API size_t wg_trace_steps(const wg_trace* trace);
/* Row-major rows x dimension copy; capacity in doubles. */
WG_API wg_status wg_trace_samples(const wg_trace* trace, double* out, size_t capacity);
WG_API wg_status wg_trace_selected(const wg_trace* trace, uint32_t* out, size_t capacity);
WG_API size_t wg_trace_weight_snapshots(const wg_trace* trace);
/* q_out has dimension entries. */
WG_API wg_status wg_trace_weight_snapshot(const wg_trace* trace, size_t index, uint64_t* step, double* q_out);
/* Mean post-burn-in autocorrelation over coordinates for lags 0..max_lag. */
WG_API wg_status wg_trace_mean_autocorrelation(const wg_trace* trace, size_t max_lag, double* out);
WG_API void wg_trace_free(wg_trace* trace);

/* ---- diagnostics on raw series ---- */
WG_API wg_status wg_effective_sample_size(const double* series, size_t n, double* ess);

#ifdef __cplusplus
}
#endif

#endif
