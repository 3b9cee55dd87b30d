#include <algorithm>
#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "wgibbs/error.hpp"
#include "wgibbs/experiment.hpp"
#include "wgibbs/models/gaussian.hpp"
#include "wgibbs/models/io.hpp"
#include "wgibbs/models/ising.hpp"
#include "wgibbs/models/lda.hpp"

namespace wgibbs {
namespace {

using detail::CsvWriter;
using detail::fmt;
namespace fs = std::filesystem;

ChainConfig chain_config(const ExperimentConfig& c, std::size_t d) {
  ChainConfig cc;
  cc.total_iterations = c.iterations * d;
  cc.burn_in = c.burn_in * d;
  cc.seed = c.seed;
  cc.thinning = c.thinning * d;
  cc.initial_sweeps = c.initial_sweeps;
  return cc;
}

SchedulerRun run_one(const ExperimentConfig& c, const std::string& name, Model& model,
                     const StateVector& init, const SweepObserver& observer) {
  auto scheduler = make_scheduler(name, weighted_config(c));
  SchedulerRun run;
  run.scheduler = name;
  run.trace = run_chain(model, *scheduler, chain_config(c, model.dimension()), init, observer);
  run.report = summarize_trace(run.trace, c.max_lag, c.esjd_max_lag);
  if (name == "weighted" && scheduler->weights()) {
    const auto q = scheduler->weights()->values();
    run.final_weights.assign(q.begin(), q.end());
  }
  return run;
}

void run_gaussian(const ExperimentConfig& c, ExperimentResult& result) {
  Rng data(c.seed, Stream::Data);
  const CovarianceParams params{c.dimension, c.rank, c.epsilon, c.lambda_cov};
  auto target = std::make_shared<const GaussianTarget>(make_covariance(params, data));
  const StateVector init(target->mean().data(), target->mean().data() + target->dimension());
  for (const auto& name : c.schedulers) {
    GaussianModel model(target);
    result.runs.push_back(run_one(c, name, model, init, {}));
  }
}

Image load_clean_image(const ExperimentConfig& c) {
  if (c.image == "synthetic") return synthetic_spin_image(c.image_size, c.image_size);
  return binarize_median(read_pgm(c.image));
}

void run_ising(const ExperimentConfig& c, ExperimentResult& result) {
  result.clean = load_clean_image(c);
  Rng data(c.seed, Stream::Data);
  result.noisy = corrupt_image(result.clean, c.sigma, data);
  const Image start = sign_threshold(result.noisy);
  result.initial_error = relative_l2_error(result.clean, start);
  auto target = std::make_shared<const IsingDenoiseTarget>(result.noisy, c.coupling, c.sigma);

  for (const auto& name : c.schedulers) {
    IsingModel model(target);
    std::vector<double> sum(start.size(), 0.0);
    std::uint64_t kept = 0;
    std::vector<double> error;
    Image estimate(start.height, start.width);
    // Before burn-in ends the current state is the estimate; afterwards the
    // running posterior mean over post-burn-in sweeps.
    auto observer = [&](std::uint64_t sweep, const StateVector& state) {
      if (sweep > c.burn_in) {
        ++kept;
        for (std::size_t i = 0; i < state.size(); ++i) sum[i] += state[i];
        for (std::size_t i = 0; i < state.size(); ++i) estimate.pixels[i] = sum[i] / static_cast<double>(kept);
      } else {
        estimate.pixels = state;
      }
      error.push_back(relative_l2_error(result.clean, estimate));
    };
    auto run = run_one(c, name, model, start.pixels, observer);
    run.error = std::move(error);
    run.posterior_variance.resize(sum.size());
    run.recovered = Image(start.height, start.width);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const double m = sum[i] / static_cast<double>(kept);
      run.posterior_variance[i] = 1.0 - m * m;
      run.recovered.pixels[i] = m >= 0.0 ? 1.0 : -1.0;
    }
    result.runs.push_back(std::move(run));
  }
}

void run_lda(const ExperimentConfig& c, ExperimentResult& result) {
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const Corpus> heldout;
  std::optional<Eigen::MatrixXd> truth;
  if (c.corpus == "bars") {
    Rng data(c.seed, Stream::Data);
    auto bars = make_bars_corpus(data, c.documents, c.document_length);
    corpus = std::make_shared<const Corpus>(std::move(bars.corpus));
    truth = std::move(bars.topics);
    if (c.heldout.empty() && c.heldout_documents > 0) {
      Rng held = Rng(c.seed, Stream::Data).split(1);
      heldout = std::make_shared<const Corpus>(make_bars_corpus(held, c.heldout_documents, c.document_length).corpus);
    }
  } else {
    corpus = std::make_shared<const Corpus>(read_corpus(c.corpus));
  }
  if (!c.heldout.empty()) {
    auto h = read_corpus(c.heldout, corpus->vocabulary_size);
    if (h.vocabulary_size > corpus->vocabulary_size)
      throw_config("heldout corpus uses word ids outside the training vocabulary");
    heldout = std::make_shared<const Corpus>(std::move(h));
  }
  corpus->validate();

  Rng init_rng(c.seed, Stream::Init);
  const LdaModel base(corpus, LdaParams{c.topics, c.alpha, c.beta}, init_rng);
  const StateVector init(corpus->documents.size(), 0.0);
  const PerplexityOptions popts{c.fold_in_sweeps, c.seed};

  for (const auto& name : c.schedulers) {
    LdaModel model = base;
    std::vector<double> loglik;
    std::vector<std::pair<std::uint64_t, double>> perplexity;
    auto observer = [&](std::uint64_t sweep, const StateVector&) {
      loglik.push_back(lda_log_likelihood(model));
      if (heldout && (sweep <= 20 || sweep % c.perplexity_every == 0 || sweep == c.iterations))
        perplexity.emplace_back(sweep, lda_perplexity(model, *heldout, popts));
    };
    auto run = run_one(c, name, model, init, observer);
    run.log_likelihood = std::move(loglik);
    run.perplexity = std::move(perplexity);
    run.topics = model.phi();
    if (truth) run.topic_distance = greedy_topic_distances(run.topics, *truth);
    result.runs.push_back(std::move(run));
  }
}

std::vector<std::string> indexed_header(std::string first, std::string_view prefix, std::size_t n,
                                        std::string second = {}) {
  std::vector<std::string> h{std::move(first)};
  if (!second.empty()) h.push_back(std::move(second));
  for (std::size_t i = 0; i < n; ++i) h.push_back(std::string(prefix) + std::to_string(i));
  return h;
}

void write_common(const ExperimentResult& result, const SchedulerRun& run, const fs::path& dir) {
  ExperimentConfig single = result.config;
  single.schedulers = {run.scheduler};
  {
    std::ofstream out(dir / "config.ini", std::ios::binary);
    out << serialize_config(single);
    if (!out) throw_io("cannot write " + (dir / "config.ini").string());
  }

  const auto& trace = run.trace;
  const std::uint64_t steps_per_row = trace.thinning;
  if (result.config.write_trace) {
    CsvWriter csv(dir / "trace.csv", indexed_header("row", "x", trace.dimension, "step"));
    std::vector<double> values(trace.dimension);
    for (Eigen::Index r = 0; r < trace.samples.rows(); ++r) {
      for (std::size_t j = 0; j < trace.dimension; ++j) values[j] = trace.samples(r, static_cast<Eigen::Index>(j));
      csv.numbers(std::to_string(r) + "," + std::to_string((r + 1) * steps_per_row), values);
    }
    csv.close();
  }

  {
    CsvWriter csv(dir / "autocorrelation.csv", {"lag", "mean_autocorrelation"});
    for (std::size_t k = 0; k < run.report.mean_autocorrelation.size(); ++k)
      csv.row({std::to_string(k), fmt(run.report.mean_autocorrelation[k])});
    csv.close();
  }
  {
    CsvWriter csv(dir / "ess.csv", {"variable", "ess", "truncation_lag", "status"});
    for (std::size_t j = 0; j < run.report.ess.size(); ++j) {
      const auto& e = run.report.ess[j];
      const char* status = e.status == EssStatus::Ok               ? "ok"
                           : e.status == EssStatus::ConstantSeries ? "constant"
                                                                   : "nonpositive_denominator";
      csv.row({std::to_string(j), fmt(e.value), std::to_string(e.truncation_lag), status});
    }
    csv.close();
  }
  {
    CsvWriter csv(dir / "esjd.csv", {"lag", "esjd"});
    for (std::size_t k = 0; k < run.report.esjd.size(); ++k) csv.row({std::to_string(k), fmt(run.report.esjd[k])});
    csv.close();
  }
  if (run.scheduler == "weighted") {
    CsvWriter csv(dir / "weights.csv", indexed_header("step", "q", trace.dimension));
    for (const auto& snap : trace.weight_snapshots) csv.numbers(std::to_string(snap.step), snap.weights.values());
    csv.close();
  }
}

nlohmann::ordered_json summary_json(const ExperimentResult& result, const SchedulerRun& run) {
  const auto& c = result.config;
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(c.kind));
  j["scheduler"] = run.scheduler;
  j["seed"] = c.seed;
  j["dimension"] = run.trace.dimension;
  j["sweeps"] = c.iterations;
  j["burn_in_sweeps"] = c.burn_in;
  j["steps"] = run.trace.selected_indices.size();
  j["recorded_rows"] = run.trace.samples.rows();
  j["min_ess"] = run.report.min_ess;
  j["mean_ess"] = run.report.mean_ess;
  if (run.report.mean_autocorrelation.size() > 1) j["mean_autocorrelation_lag1"] = run.report.mean_autocorrelation[1];
  if (run.report.esjd.size() > 1) j["esjd_lag1"] = run.report.esjd[1];
  j["weight_updates"] = run.trace.weight_snapshots.size();
  switch (c.kind) {
    case ExperimentKind::Ising:
      j["initial_error"] = result.initial_error;
      j["final_error"] = run.error.empty() ? 0.0 : run.error.back();
      break;
    case ExperimentKind::Lda:
      if (!run.log_likelihood.empty()) j["final_log_likelihood"] = run.log_likelihood.back();
      if (!run.perplexity.empty()) j["final_perplexity"] = run.perplexity.back().second;
      if (!run.topic_distance.empty()) {
        j["topic_distance"] = run.topic_distance;
        j["max_topic_distance"] = *std::max_element(run.topic_distance.begin(), run.topic_distance.end());
      }
      break;
    default:
      break;
  }
  return j;
}

Image noisy_to_gray(const Image& noisy) {
  Image gray(noisy.height, noisy.width);
  for (std::size_t i = 0; i < noisy.size(); ++i)
    gray.pixels[i] = std::clamp(std::round((noisy.pixels[i] + 2.0) / 4.0 * 255.0), 0.0, 255.0);
  return gray;
}

void write_run(const ExperimentResult& result, const SchedulerRun& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create " + dir.string() + ": " + ec.message());
  write_common(result, run, dir);
  const auto& c = result.config;

  switch (c.kind) {
    case ExperimentKind::Gaussian: {
      const Eigen::MatrixXd samples = run.trace.samples;
      const auto pca = pca_project(samples, 2);
      CsvWriter csv(dir / "pca_trace.csv", {"row", "step", "pc1", "pc2"});
      for (Eigen::Index r = 0; r < pca.scores.rows(); ++r)
        csv.row({std::to_string(r), std::to_string((r + 1) * run.trace.thinning), fmt(pca.scores(r, 0)),
                 fmt(pca.scores(r, 1))});
      csv.close();
      break;
    }
    case ExperimentKind::Ising: {
      write_spin_pgm(dir / "clean.pgm", result.clean);
      write_pgm(dir / "noisy.pgm", noisy_to_gray(result.noisy));
      write_float_image(dir / "noisy.f32", result.noisy);
      write_spin_pgm(dir / "recovered.pgm", run.recovered);
      CsvWriter err(dir / "error.csv", {"sweep", "relative_l2_error"});
      for (std::size_t s = 0; s < run.error.size(); ++s) err.row({std::to_string(s + 1), fmt(run.error[s])});
      err.close();
      CsvWriter var(dir / "posterior_variance.csv", {"pixel", "row", "col", "variance"});
      for (std::size_t i = 0; i < run.posterior_variance.size(); ++i)
        var.row({std::to_string(i), std::to_string(i / result.clean.width), std::to_string(i % result.clean.width),
                 fmt(run.posterior_variance[i])});
      var.close();
      break;
    }
    case ExperimentKind::Lda: {
      CsvWriter ll(dir / "loglik.csv", {"sweep", "log_likelihood"});
      for (std::size_t s = 0; s < run.log_likelihood.size(); ++s)
        ll.row({std::to_string(s + 1), fmt(run.log_likelihood[s])});
      ll.close();
      if (!run.perplexity.empty()) {
        CsvWriter pp(dir / "perplexity.csv", {"sweep", "perplexity"});
        for (const auto& [sweep, value] : run.perplexity) pp.row({std::to_string(sweep), fmt(value)});
        pp.close();
      }
      std::vector<std::string> header{"topic"};
      std::vector<std::string> vocab;
      if (!c.vocab.empty()) vocab = read_vocabulary(c.vocab);
      for (Eigen::Index v = 0; v < run.topics.cols(); ++v) {
        const auto i = static_cast<std::size_t>(v);
        header.push_back(i < vocab.size() && !vocab[i].empty() ? vocab[i] : "w" + std::to_string(i));
      }
      CsvWriter topics(dir / "topics.csv", header);
      std::vector<double> row(static_cast<std::size_t>(run.topics.cols()));
      for (Eigen::Index k = 0; k < run.topics.rows(); ++k) {
        for (Eigen::Index v = 0; v < run.topics.cols(); ++v) row[static_cast<std::size_t>(v)] = run.topics(k, v);
        topics.numbers(std::to_string(k), row);
      }
      topics.close();
      break;
    }
    case ExperimentKind::Validate:
      break;
  }

  std::ofstream js(dir / "summary.json", std::ios::binary);
  js << summary_json(result, run).dump(2) << '\n';
  if (!js) throw_io("cannot write " + (dir / "summary.json").string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  if (config.kind == ExperimentKind::Validate)
    throw_config("run_experiment: validate experiments go through run_validation");
  ExperimentResult result;
  result.config = config;
  switch (config.kind) {
    case ExperimentKind::Gaussian: run_gaussian(config, result); break;
    case ExperimentKind::Ising: run_ising(config, result); break;
    case ExperimentKind::Lda: run_lda(config, result); break;
    case ExperimentKind::Validate: break;
  }
  return result;
}

void write_experiment(const ExperimentResult& result, const fs::path& output) {
  for (const auto& run : result.runs) write_run(result, run, output / run.scheduler);
}

ExperimentResult run_and_write(const ExperimentConfig& config) {
  auto result = run_experiment(config);
  write_experiment(result, config.output);
  return result;
}

}  // namespace wgibbs
