/* Exercises the public C interface from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "wgibbs/wgibbs.h"

static int failures = 0;

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "%s:%d: CHECK(%s) failed [%s]\n", __FILE__, __LINE__, \
              #cond, wg_last_error());                                     \
      ++failures;                                                          \
    }                                                                      \
  } while (0)

static void count_lines(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static void test_weights(void) {
  const double d[2] = {4.0, 1.0};
  double q[2];
  CHECK(wg_compute_weights(d, 2, 0.0, q) == WG_OK);
  CHECK(fabs(q[0] - 2.0 / 3.0) < 1e-15 && fabs(q[1] - 1.0 / 3.0) < 1e-15);

  const double zero[2] = {0.0, 1.0};
  CHECK(wg_compute_weights(zero, 2, 0.0, q) == WG_ERR_INVALID);
  CHECK(strlen(wg_last_error()) > 0);
  CHECK(wg_compute_weights(NULL, 2, 0.0, q) == WG_ERR_INVALID);
}

static void test_config(void) {
  wg_config* cfg = NULL;
  char* text = NULL;
  char* value = NULL;
  wg_config* back = NULL;
  char* text2 = NULL;

  CHECK(wg_config_default("ising", &cfg) == WG_OK);
  CHECK(wg_config_set(cfg, "chain.seed", "12") == WG_OK);
  CHECK(wg_config_get(cfg, "chain.seed", &value) == WG_OK);
  CHECK(value && strcmp(value, "12") == 0);
  wg_string_free(value);

  CHECK(wg_config_set(cfg, "chain.bogus", "1") == WG_ERR_CONFIG);
  CHECK(wg_config_set(cfg, "chain.seed", "twelve") == WG_ERR_CONFIG);

  CHECK(wg_config_serialize(cfg, &text) == WG_OK);
  CHECK(wg_config_parse(text, &back) == WG_OK);
  CHECK(wg_config_serialize(back, &text2) == WG_OK);
  CHECK(text && text2 && strcmp(text, text2) == 0);
  wg_string_free(text);
  wg_string_free(text2);
  wg_config_free(back);
  wg_config_free(cfg);

  cfg = NULL;
  CHECK(wg_config_parse("[experiment]\nkind = gaussian\nnope = 1\n", &cfg) == WG_ERR_CONFIG);
  CHECK(cfg == NULL);
  CHECK(wg_config_load("does/not/exist.ini", &cfg) == WG_ERR_IO);
  CHECK(wg_config_default("astrology", &cfg) == WG_ERR_CONFIG);
}

static void test_chain(void) {
  /* bivariate Gaussian, correlation 0.5 */
  const double mean[2] = {0.0, 0.0};
  const double cov[4] = {1.0, 0.5, 0.5, 1.0};
  const double init[2] = {0.0, 0.0};
  const double bad_cov[4] = {1.0, 2.0, 2.0, 1.0};
  wg_model* model = NULL;
  wg_model* bad = NULL;
  wg_scheduler* sched = NULL;
  wg_scheduler* none = NULL;
  wg_trace* trace = NULL;
  wg_trace* again = NULL;
  wg_weighted_options wopt;
  wg_chain_options copt;
  double* samples;
  double* samples2;
  uint32_t* selected;
  double acf[6];
  double q[2];
  uint64_t step = 99;
  size_t rows, i;

  CHECK(wg_model_gaussian_create(mean, cov, 2, &model) == WG_OK);
  CHECK(wg_model_dimension(model) == 2);
  CHECK(wg_model_gaussian_create(mean, bad_cov, 2, &bad) == WG_ERR_INVALID);

  wg_weighted_options_default(&wopt);
  CHECK(wopt.lambda < 0.0);
  CHECK(wopt.relative_lambda == 1.0);
  CHECK(wg_scheduler_create("weighted", &wopt, &sched) == WG_OK);
  CHECK(wg_scheduler_create("herded", NULL, &none) == WG_ERR_INVALID);

  wg_chain_options_default(&copt);
  copt.total_iterations = 4000;
  copt.burn_in = 400;
  copt.seed = 5;
  CHECK(wg_chain_run(model, sched, &copt, init, &trace) == WG_OK);
  rows = wg_trace_rows(trace);
  CHECK(rows == 4000);
  CHECK(wg_trace_dimension(trace) == 2);
  CHECK(wg_trace_steps(trace) == 4000);

  samples = malloc(sizeof(double) * rows * 2);
  samples2 = malloc(sizeof(double) * rows * 2);
  selected = malloc(sizeof(uint32_t) * rows);
  CHECK(wg_trace_samples(trace, samples, rows * 2) == WG_OK);
  CHECK(wg_trace_samples(trace, samples, 3) == WG_ERR_INVALID);
  CHECK(wg_trace_selected(trace, selected, rows) == WG_OK);
  /* consecutive rows differ only in the selected coordinate */
  for (i = 1; i < rows; ++i) {
    const uint32_t other = 1u - selected[i];
    if (samples[i * 2 + other] != samples[(i - 1) * 2 + other]) {
      CHECK(0);
      break;
    }
  }

  CHECK(wg_trace_weight_snapshots(trace) > 1);
  CHECK(wg_trace_weight_snapshot(trace, 0, &step, q) == WG_OK);
  CHECK(step == 0 && q[0] == 0.5);
  CHECK(wg_trace_weight_snapshot(trace, 100000, &step, q) == WG_ERR_INVALID);

  CHECK(wg_trace_mean_autocorrelation(trace, 5, acf) == WG_OK);
  CHECK(fabs(acf[0] - 1.0) < 1e-12);
  CHECK(acf[1] > 0.0 && acf[1] < 1.0);

  /* same seed, same scheduler settings -> identical samples */
  CHECK(wg_chain_run(model, sched, &copt, init, &again) == WG_OK);
  CHECK(wg_trace_samples(again, samples2, rows * 2) == WG_OK);
  CHECK(memcmp(samples, samples2, sizeof(double) * rows * 2) == 0);

  copt.burn_in = copt.total_iterations;
  wg_trace_free(again);
  again = NULL;
  CHECK(wg_chain_run(model, sched, &copt, init, &again) == WG_ERR_INVALID);
  CHECK(again == NULL);

  free(samples);
  free(samples2);
  free(selected);
  wg_trace_free(trace);
  wg_scheduler_free(sched);
  wg_model_free(model);
}

static void test_ising_model(void) {
  const double observed[6] = {1.2, -0.4, 0.3, -2.0, 0.9, 0.1};
  wg_model* model = NULL;
  CHECK(wg_model_ising_create(observed, 2, 3, 1.0, 1.0, &model) == WG_OK);
  CHECK(wg_model_dimension(model) == 6);
  wg_model_free(model);
  CHECK(wg_model_ising_create(observed, 2, 3, 1.0, 0.0, &model) == WG_ERR_INVALID);
  CHECK(wg_model_gaussian_random(10, 2, 5.0, 10.0, 3, &model) == WG_OK);
  CHECK(wg_model_dimension(model) == 10);
  wg_model_free(model);
}

static void test_ess(void) {
  double series[1000];
  double flat[10];
  double ess = 0.0;
  unsigned s = 1;
  int i;
  for (i = 0; i < 1000; ++i) {
    s = s * 1103515245u + 12345u;
    series[i] = (double)(s >> 8) / 16777216.0;
  }
  for (i = 0; i < 10; ++i) flat[i] = 2.0;
  CHECK(wg_effective_sample_size(series, 1000, &ess) == WG_OK);
  CHECK(ess > 500.0);
  CHECK(wg_effective_sample_size(flat, 10, &ess) == WG_ERR_NUMERIC);
}

static void test_experiment_and_compare(void) {
  wg_config* cfg = NULL;
  int lines = 0;
  char* csv = NULL;
  const char* dirs[1] = {"capi_out"};
  wg_validation_summary summary;

  CHECK(wg_config_default("gaussian", &cfg) == WG_OK);
  CHECK(wg_config_set(cfg, "experiment.output", "capi_out") == WG_OK);
  CHECK(wg_config_set(cfg, "model.dimension", "4") == WG_OK);
  CHECK(wg_config_set(cfg, "model.rank", "2") == WG_OK);
  CHECK(wg_config_set(cfg, "chain.iterations", "200") == WG_OK);
  CHECK(wg_config_set(cfg, "chain.burn_in", "20") == WG_OK);
  CHECK(wg_config_set(cfg, "diagnostics.max_lag", "5") == WG_OK);
  CHECK(wg_experiment_run(cfg, count_lines, &lines) == WG_OK);
  CHECK(lines == 3);
  CHECK(wg_compare(dirs, 1, NULL, &csv) == WG_OK);
  CHECK(csv && strncmp(csv, "lag,systematic,random,weighted\n", 31) == 0);
  wg_string_free(csv);
  csv = NULL;
  CHECK(wg_compare(dirs, 1, "no_such_metric", &csv) == WG_ERR_IO);

  CHECK(wg_config_set(cfg, "chain.burn_in", "500") == WG_OK);
  CHECK(wg_experiment_run(cfg, NULL, NULL) == WG_ERR_CONFIG);
  wg_config_free(cfg);

  lines = 0;
  CHECK(wg_validate(5, 10, 1, count_lines, &lines, &summary) == WG_OK);
  CHECK(summary.passed == 1);
  CHECK(summary.theorem_trials == 5);
  CHECK(summary.max_stationarity_residual <= 1e-10);
  CHECK(lines >= 15);
}

int main(void) {
  CHECK(strlen(wg_version()) > 0);
  test_weights();
  test_config();
  test_chain();
  test_ising_model();
  test_ess();
  test_experiment_and_compare();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
