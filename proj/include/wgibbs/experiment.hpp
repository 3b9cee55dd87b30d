#pragma once

// Config-driven experiment harness: builds a model, runs every listed
// scheduler from the same seed and initial state, and writes per-scheduler
// output directories (CSV + JSON).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/diagnostics.hpp"
#include "wgibbs/engine.hpp"
#include "wgibbs/models/image.hpp"

namespace wgibbs {

enum class ExperimentKind { Gaussian, Ising, Lda, Validate };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

// Flat key=value config with [section] headers. Chain lengths are counted in
// sweeps (d single-variable updates each).
struct ExperimentConfig {
  // [experiment]
  ExperimentKind kind = ExperimentKind::Gaussian;
  std::string output = "wgibbs-out";

  // [model] gaussian
  std::size_t dimension = 50;
  std::size_t rank = 5;
  double epsilon = 5.0;
  double lambda_cov = 10.0;
  // [model] ising
  double coupling = 1.0;
  double sigma = 1.0;
  std::string image = "synthetic";  // PGM path or "synthetic"
  std::size_t image_size = 64;      // side of the synthetic image
  // [model] lda
  std::size_t topics = 8;
  double alpha = 0.5;
  double beta = 0.1;
  std::string corpus = "bars";  // corpus path or "bars"
  std::size_t documents = 2000;
  std::size_t document_length = 100;
  std::string heldout;            // heldout corpus path; empty = none (or generated for bars)
  std::size_t heldout_documents = 200;
  std::string vocab;              // optional vocabulary file

  // [chain]
  std::uint64_t iterations = 20000;  // sweeps
  std::uint64_t burn_in = 2000;      // sweeps
  std::uint64_t thinning = 1;        // sweeps between recorded states
  std::uint64_t seed = 1;
  std::uint64_t initial_sweeps = 2;

  // [scheduler]
  std::vector<std::string> schedulers{"systematic", "random", "weighted"};
  std::optional<double> lambda;      // absolute; empty = relative
  double relative_lambda = 1.0;
  std::uint64_t update_period = 0;   // steps; 0 = once per sweep
  bool adapt_after_burn_in = true;
  double forgetting = 1.0;

  // [diagnostics]
  std::size_t max_lag = 50;
  std::size_t esjd_max_lag = 20;
  bool write_trace = true;
  std::uint64_t perplexity_every = 10;  // plus every sweep up to 20
  std::size_t fold_in_sweeps = 20;

  // [validate]
  std::size_t trials = 50;
  std::size_t lemma_trials = 100;

  // Defaults that differ by experiment kind.
  static ExperimentConfig defaults_for(ExperimentKind kind);

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws Error(Config) on syntax errors, unknown sections/keys, duplicate
// keys or unparsable values. The kind key may appear anywhere; defaults come
// from defaults_for(kind).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text: every key, fixed order, doubles with 17 significant digits.
std::string serialize_config(const ExperimentConfig& config);

// Sets one "section.key" (or bare "key" when unambiguous) from text.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// Text of one "section.key" (or unambiguous bare key) as serialised.
std::string get_config_value(const ExperimentConfig& config, std::string_view key);

// Structural checks (positive sizes, burn_in < iterations, known schedulers).
void validate_config(const ExperimentConfig& config);

WeightedSchedulerConfig weighted_config(const ExperimentConfig& config);

struct SchedulerRun {
  std::string scheduler;
  ChainTrace trace;
  DiagnosticsReport report;
  // Per-sweep metric series (one entry per sweep unless noted).
  std::vector<double> error;                 // ising: relative L2 error
  std::vector<double> log_likelihood;        // lda
  std::vector<std::pair<std::uint64_t, double>> perplexity;  // lda: (sweep, value)
  std::vector<double> posterior_variance;    // ising: 1 - m_i^2 per pixel
  Image recovered;                           // ising: sign of posterior mean
  Eigen::MatrixXd topics;                    // lda: K x V
  std::vector<double> topic_distance;        // lda bars: greedy TV per true topic
  std::vector<double> final_weights;         // weighted scheduler only
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SchedulerRun> runs;
  // ising
  Image clean;
  Image noisy;
  double initial_error = 0.0;  // error of sign(noisy)
};

// Runs every scheduler in config.schedulers. Nothing is written to disk.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes output/<scheduler>/... for every run. Throws Error(Io).
void write_experiment(const ExperimentResult& result, const std::filesystem::path& output);

// run_experiment + write_experiment into config.output.
ExperimentResult run_and_write(const ExperimentConfig& config);

// Joins one metric across scheduler output directories. Each argument may be
// a scheduler directory (containing config.ini) or an experiment root whose
// subdirectories are scheduler directories. `metric` empty picks the kind's
// default (gaussian: autocorrelation, ising: error, lda: perplexity).
// Throws Error(Config) when kinds, model or chain settings differ.
std::string compare_outputs(const std::vector<std::filesystem::path>& directories,
                            std::string_view metric = {});

struct ValidationSummary {
  std::size_t theorem_trials = 0;
  double max_stationarity_residual = 0.0;
  std::size_t lemma_trials = 0;
  double max_weight_error = 0.0;          // numeric vs analytic, per coordinate
  double max_objective_relative_error = 0.0;
  bool passed = false;
};

// Randomised stationarity and optimal-weight checks; prints one line per
// trial to `log` when given.
ValidationSummary run_validation(std::size_t theorem_trials, std::size_t lemma_trials,
                                 std::uint64_t seed, std::ostream* log = nullptr);

}  // namespace wgibbs
