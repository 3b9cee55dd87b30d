#include "wgibbs/wgibbs.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "wgibbs/diagnostics.hpp"
#include "wgibbs/engine.hpp"
#include "wgibbs/error.hpp"
#include "wgibbs/experiment.hpp"
#include "wgibbs/models/gaussian.hpp"
#include "wgibbs/models/ising.hpp"
#include "wgibbs/schedulers.hpp"

struct wg_config {
  wgibbs::ExperimentConfig config;
};
struct wg_model {
  std::unique_ptr<wgibbs::Model> model;
};
struct wg_scheduler {
  std::unique_ptr<wgibbs::Scheduler> scheduler;
};
struct wg_trace {
  wgibbs::ChainTrace trace;
};

namespace {

thread_local std::string last_error;

wg_status fail(wg_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions to status codes.
template <class F>
wg_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const wgibbs::Error& e) {
    return fail(static_cast<wg_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WG_ERR_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Forwards complete lines written to the stream to a log callback.
class LineBuffer : public std::stringbuf {
 public:
  LineBuffer(wg_log_fn fn, void* user) : fn_(fn), user_(user) {}
  int sync() override {
    std::string text = str();
    std::size_t start = 0;
    for (std::size_t nl; (nl = text.find('\n', start)) != std::string::npos; start = nl + 1)
      if (fn_) fn_(text.substr(start, nl - start).c_str(), user_);
    str(text.substr(start));
    return 0;
  }

 private:
  wg_log_fn fn_;
  void* user_;
};

#define WG_REQUIRE(cond, msg) \
  if (!(cond)) return fail(WG_ERR_INVALID, msg)

}  // namespace

extern "C" {

const char* wg_version(void) { return "0.1.0"; }

const char* wg_last_error(void) { return last_error.c_str(); }

void wg_string_free(char* text) { std::free(text); }

wg_status wg_config_load(const char* path, wg_config** out) {
  WG_REQUIRE(path && out, "wg_config_load: null argument");
  return guarded([&] {
    *out = new wg_config{wgibbs::load_config(path)};
    return WG_OK;
  });
}

wg_status wg_config_parse(const char* text, wg_config** out) {
  WG_REQUIRE(text && out, "wg_config_parse: null argument");
  return guarded([&] {
    *out = new wg_config{wgibbs::parse_config(text)};
    return WG_OK;
  });
}

wg_status wg_config_default(const char* kind, wg_config** out) {
  WG_REQUIRE(kind && out, "wg_config_default: null argument");
  return guarded([&] {
    *out = new wg_config{wgibbs::ExperimentConfig::defaults_for(wgibbs::parse_experiment_kind(kind))};
    return WG_OK;
  });
}

wg_status wg_config_set(wg_config* config, const char* key, const char* value) {
  WG_REQUIRE(config && key && value, "wg_config_set: null argument");
  return guarded([&] {
    wgibbs::set_config_value(config->config, key, value);
    return WG_OK;
  });
}

wg_status wg_config_get(const wg_config* config, const char* key, char** out) {
  WG_REQUIRE(config && key && out, "wg_config_get: null argument");
  return guarded([&] {
    *out = duplicate(wgibbs::get_config_value(config->config, key));
    return WG_OK;
  });
}

wg_status wg_config_serialize(const wg_config* config, char** out) {
  WG_REQUIRE(config && out, "wg_config_serialize: null argument");
  return guarded([&] {
    *out = duplicate(wgibbs::serialize_config(config->config));
    return WG_OK;
  });
}

void wg_config_free(wg_config* config) { delete config; }

wg_status wg_experiment_run(const wg_config* config, wg_log_fn log, void* user) {
  WG_REQUIRE(config, "wg_experiment_run: null config");
  return guarded([&] {
    const auto& c = config->config;
    wgibbs::validate_config(c);
    if (c.kind == wgibbs::ExperimentKind::Validate) {
      LineBuffer buf(log, user);
      std::ostream os(&buf);
      const auto s = wgibbs::run_validation(c.trials, c.lemma_trials, c.seed, &os);
      os.flush();
      return s.passed ? WG_OK : fail(WG_ERR_NUMERIC, "validation checks exceeded their tolerances");
    }
    const auto result = wgibbs::run_and_write(c);
    if (log) {
      for (const auto& run : result.runs) {
        const std::string line = std::string(run.scheduler) + ": wrote " + (std::filesystem::path(c.output) / run.scheduler).string();
        log(line.c_str(), user);
      }
    }
    return WG_OK;
  });
}

wg_status wg_compare(const char* const* directories, size_t count, const char* metric, char** out_csv) {
  WG_REQUIRE(directories && out_csv, "wg_compare: null argument");
  return guarded([&] {
    std::vector<std::filesystem::path> dirs;
    for (size_t i = 0; i < count; ++i) {
      if (!directories[i]) return fail(WG_ERR_INVALID, "wg_compare: null directory");
      dirs.emplace_back(directories[i]);
    }
    *out_csv = duplicate(wgibbs::compare_outputs(dirs, metric ? metric : ""));
    return WG_OK;
  });
}

wg_status wg_validate(size_t theorem_trials, size_t lemma_trials, uint64_t seed, wg_log_fn log, void* user,
                      wg_validation_summary* out) {
  return guarded([&] {
    LineBuffer buf(log, user);
    std::ostream os(&buf);
    const auto s = wgibbs::run_validation(theorem_trials, lemma_trials, seed, &os);
    os.flush();
    if (out) *out = {s.theorem_trials, s.max_stationarity_residual, s.lemma_trials, s.max_weight_error,
                     s.max_objective_relative_error, s.passed ? 1 : 0};
    return s.passed ? WG_OK : fail(WG_ERR_NUMERIC, "validation checks exceeded their tolerances");
  });
}

wg_status wg_compute_weights(const double* d_hat, size_t n, double lambda, double* q_out) {
  WG_REQUIRE(d_hat && q_out && n > 0, "wg_compute_weights: null or empty argument");
  return guarded([&] {
    const auto q = wgibbs::compute_weights({d_hat, n}, lambda);
    std::copy(q.values().begin(), q.values().end(), q_out);
    return WG_OK;
  });
}

wg_status wg_model_gaussian_create(const double* mean, const double* covariance, size_t d, wg_model** out) {
  WG_REQUIRE(mean && covariance && out && d > 0, "wg_model_gaussian_create: null or empty argument");
  return guarded([&] {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mean, n);
    Eigen::MatrixXd cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        covariance, n, n);
    auto target = std::make_shared<const wgibbs::GaussianTarget>(std::move(mu), std::move(cov));
    *out = new wg_model{std::make_unique<wgibbs::GaussianModel>(std::move(target))};
    return WG_OK;
  });
}

wg_status wg_model_gaussian_random(size_t d, size_t r, double epsilon, double lambda_cov, uint64_t seed,
                                   wg_model** out) {
  WG_REQUIRE(out, "wg_model_gaussian_random: null argument");
  return guarded([&] {
    wgibbs::Rng rng(seed, wgibbs::Stream::Data);
    auto target = std::make_shared<const wgibbs::GaussianTarget>(
        wgibbs::make_covariance({d, r, epsilon, lambda_cov}, rng));
    *out = new wg_model{std::make_unique<wgibbs::GaussianModel>(std::move(target))};
    return WG_OK;
  });
}

wg_status wg_model_ising_create(const double* observed, size_t height, size_t width, double coupling, double sigma,
                                wg_model** out) {
  WG_REQUIRE(observed && out && height > 0 && width > 0, "wg_model_ising_create: null or empty argument");
  return guarded([&] {
    wgibbs::Image image(height, width);
    std::copy(observed, observed + height * width, image.pixels.begin());
    auto target = std::make_shared<const wgibbs::IsingDenoiseTarget>(std::move(image), coupling, sigma);
    *out = new wg_model{std::make_unique<wgibbs::IsingModel>(std::move(target))};
    return WG_OK;
  });
}

size_t wg_model_dimension(const wg_model* model) { return model ? model->model->dimension() : 0; }

void wg_model_free(wg_model* model) { delete model; }

void wg_weighted_options_default(wg_weighted_options* options) {
  if (!options) return;
  const wgibbs::WeightedSchedulerConfig d;
  *options = {d.update_period, -1.0, d.relative_regularization, d.adapt_after_burn_in ? 1 : 0, d.forgetting};
}

wg_status wg_scheduler_create(const char* name, const wg_weighted_options* options, wg_scheduler** out) {
  WG_REQUIRE(name && out, "wg_scheduler_create: null argument");
  return guarded([&] {
    wgibbs::WeightedSchedulerConfig cfg;
    if (options) {
      cfg.update_period = options->update_period;
      if (options->lambda >= 0.0) cfg.regularization = options->lambda;
      cfg.relative_regularization = options->relative_lambda;
      cfg.adapt_after_burn_in = options->adapt_after_burn_in != 0;
      cfg.forgetting = options->forgetting;
    }
    *out = new wg_scheduler{wgibbs::make_scheduler(name, cfg)};
    return WG_OK;
  });
}

void wg_scheduler_free(wg_scheduler* scheduler) { delete scheduler; }

void wg_chain_options_default(wg_chain_options* options) {
  if (!options) return;
  const wgibbs::ChainConfig d;
  *options = {d.total_iterations, d.burn_in, d.seed, d.thinning, d.initial_sweeps};
}

wg_status wg_chain_run(wg_model* model, wg_scheduler* scheduler, const wg_chain_options* options,
                       const double* initial_state, wg_trace** out) {
  WG_REQUIRE(model && scheduler && options && initial_state && out, "wg_chain_run: null argument");
  return guarded([&] {
    const wgibbs::ChainConfig cfg{options->total_iterations, options->burn_in, options->seed, options->thinning,
                                  options->initial_sweeps};
    const auto d = model->model->dimension();
    wgibbs::StateVector init(initial_state, initial_state + d);
    auto trace = wgibbs::run_chain(*model->model, *scheduler->scheduler, cfg, std::move(init));
    *out = new wg_trace{std::move(trace)};
    return WG_OK;
  });
}

size_t wg_trace_rows(const wg_trace* trace) { return trace ? static_cast<size_t>(trace->trace.samples.rows()) : 0; }

size_t wg_trace_dimension(const wg_trace* trace) { return trace ? trace->trace.dimension : 0; }

size_t wg_trace_steps(const wg_trace* trace) { return trace ? trace->trace.selected_indices.size() : 0; }

wg_status wg_trace_samples(const wg_trace* trace, double* out, size_t capacity) {
  WG_REQUIRE(trace && out, "wg_trace_samples: null argument");
  const auto& s = trace->trace.samples;
  const auto n = static_cast<size_t>(s.size());
  WG_REQUIRE(capacity >= n, "wg_trace_samples: buffer too small");
  std::copy(s.data(), s.data() + n, out);
  return WG_OK;
}

wg_status wg_trace_selected(const wg_trace* trace, uint32_t* out, size_t capacity) {
  WG_REQUIRE(trace && out, "wg_trace_selected: null argument");
  const auto& idx = trace->trace.selected_indices;
  WG_REQUIRE(capacity >= idx.size(), "wg_trace_selected: buffer too small");
  std::copy(idx.begin(), idx.end(), out);
  return WG_OK;
}

size_t wg_trace_weight_snapshots(const wg_trace* trace) { return trace ? trace->trace.weight_snapshots.size() : 0; }

wg_status wg_trace_weight_snapshot(const wg_trace* trace, size_t index, uint64_t* step, double* q_out) {
  WG_REQUIRE(trace && q_out, "wg_trace_weight_snapshot: null argument");
  WG_REQUIRE(index < trace->trace.weight_snapshots.size(), "wg_trace_weight_snapshot: index out of range");
  const auto& snap = trace->trace.weight_snapshots[index];
  if (step) *step = snap.step;
  std::copy(snap.weights.values().begin(), snap.weights.values().end(), q_out);
  return WG_OK;
}

wg_status wg_trace_mean_autocorrelation(const wg_trace* trace, size_t max_lag, double* out) {
  WG_REQUIRE(trace && out, "wg_trace_mean_autocorrelation: null argument");
  return guarded([&] {
    const auto report = wgibbs::summarize_trace(trace->trace, max_lag, 0);
    if (report.mean_autocorrelation.size() != max_lag + 1)
      return fail(WG_ERR_INVALID, "wg_trace_mean_autocorrelation: trace too short for max_lag");
    std::copy(report.mean_autocorrelation.begin(), report.mean_autocorrelation.end(), out);
    return WG_OK;
  });
}

void wg_trace_free(wg_trace* trace) { delete trace; }

wg_status wg_effective_sample_size(const double* series, size_t n, double* ess) {
  WG_REQUIRE(series && ess, "wg_effective_sample_size: null argument");
  return guarded([&] {
    const auto r = wgibbs::effective_sample_size({series, n});
    *ess = r.value;
    return r.status == wgibbs::EssStatus::Ok ? WG_OK : fail(WG_ERR_NUMERIC, "effective sample size is degenerate");
  });
}

}  // extern "C"
