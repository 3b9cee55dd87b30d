#include "wgibbs/schedulers.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wgibbs/error.hpp"

namespace wgibbs {
namespace {

std::discrete_distribution<std::size_t> make_distribution(const SelectionWeights& q) {
  const auto v = q.values();
  return std::discrete_distribution<std::size_t>(v.begin(), v.end());
}

}  // namespace

SelectionWeights::SelectionWeights(std::vector<double> q) : q_(std::move(q)) {
  if (q_.empty()) throw_invalid("selection weights: empty vector");
  long double sum = 0.0L;
  for (double v : q_) {
    if (!std::isfinite(v) || v <= 0.0)
      throw_invalid("selection weights: entries must be finite and positive");
    sum += v;
  }
  if (std::fabs(static_cast<double>(sum - 1.0L)) > kSumTolerance)
    throw_invalid("selection weights: entries must sum to one");
}

SelectionWeights SelectionWeights::uniform(std::size_t d) {
  if (d == 0) throw_invalid("selection weights: dimension must be positive");
  return SelectionWeights(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

VarianceAccumulator::VarianceAccumulator(std::size_t dimension, double forgetting)
    : forgetting_(forgetting),
      count_(dimension, 0),
      weight_(dimension, 0.0),
      mean_(dimension, 0.0),
      ssd_(dimension, 0.0) {
  if (!(forgetting > 0.0 && forgetting <= 1.0))
    throw_invalid("variance accumulator: forgetting factor must lie in (0, 1]");
}

void VarianceAccumulator::feed(std::size_t index, double value) {
  if (index >= count_.size()) throw_invalid("variance accumulator: index out of range");
  // West's weighted update; reduces to Welford when forgetting == 1.
  ++count_[index];
  weight_[index] = forgetting_ * weight_[index] + 1.0;
  const double delta = value - mean_[index];
  mean_[index] += delta / weight_[index];
  ssd_[index] = forgetting_ * ssd_[index] + delta * (value - mean_[index]);
  if (ssd_[index] < 0.0) ssd_[index] = 0.0;
}

std::optional<double> VarianceAccumulator::d_hat(std::size_t i) const {
  if (count_[i] < 2) return std::nullopt;
  return 2.0 * ssd_[i] / weight_[i];
}

std::vector<double> VarianceAccumulator::d_hat_or_zero() const {
  std::vector<double> out(count_.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d_hat(i).value_or(0.0);
  return out;
}

std::vector<double> VarianceAccumulator::mean_or_zero() const {
  std::vector<double> out(count_.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (count_[i] > 0) out[i] = mean_[i];
  return out;
}

std::size_t systematic_next(std::uint64_t t, std::size_t d) {
  if (t == 0 || d == 0) throw_invalid("systematic_next: t and d must be positive");
  return static_cast<std::size_t>((t - 1) % d);
}

std::size_t categorical_next(Rng& rng, const SelectionWeights& q) {
  auto dist = make_distribution(q);
  return dist(rng);
}

SelectionWeights compute_weights(std::span<const double> d_hat, double lambda) {
  if (d_hat.empty()) throw_invalid("compute_weights: empty d_hat");
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw_invalid("compute_weights: lambda must be finite and nonnegative");
  std::vector<long double> raw(d_hat.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < d_hat.size(); ++i) {
    const double v = d_hat[i];
    if (!std::isfinite(v) || v < 0.0)
      throw_invalid("compute_weights: d_hat entries must be finite and nonnegative");
    if (v == 0.0 && lambda == 0.0)
      throw_invalid("compute_weights: zero d_hat entry requires lambda > 0");
    raw[i] = std::sqrt(static_cast<long double>(v)) + lambda;
    total += raw[i];
  }
  std::vector<double> q(raw.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = static_cast<double>(raw[i] / total);
  return SelectionWeights(std::move(q));
}

// --- systematic ---------------------------------------------------------

void SystematicScheduler::reset(std::size_t dimension, SummaryKind) {
  if (dimension == 0) throw_invalid("scheduler: dimension must be positive");
  dimension_ = dimension;
  t_ = 0;
}

std::size_t SystematicScheduler::next(Rng&) { return systematic_next(++t_, dimension_); }

std::unique_ptr<Scheduler> SystematicScheduler::clone() const {
  return std::make_unique<SystematicScheduler>(*this);
}

// --- random scan --------------------------------------------------------

RandomScanScheduler::RandomScanScheduler(SelectionWeights q)
    : fixed_(true), q_(std::move(q)), dist_(make_distribution(*q_)) {}

void RandomScanScheduler::reset(std::size_t dimension, SummaryKind) {
  if (dimension == 0) throw_invalid("scheduler: dimension must be positive");
  if (fixed_) {
    if (q_->size() != dimension)
      throw_invalid("random scan: selection weights do not match model dimension");
  } else {
    q_ = SelectionWeights::uniform(dimension);
  }
  dist_ = make_distribution(*q_);
}

std::size_t RandomScanScheduler::next(Rng& rng) { return dist_(rng); }

std::unique_ptr<Scheduler> RandomScanScheduler::clone() const {
  return std::make_unique<RandomScanScheduler>(*this);
}

// --- weighted -----------------------------------------------------------

WeightedScheduler::WeightedScheduler(WeightedSchedulerConfig config)
    : config_(std::move(config)) {
  if (config_.regularization && (!std::isfinite(*config_.regularization) ||
                                 *config_.regularization < 0.0))
    throw_invalid("weighted scheduler: regularization must be nonnegative");
  if (!(config_.relative_regularization >= 0.0) || !(config_.min_regularization >= 0.0))
    throw_invalid("weighted scheduler: relative regularization must be nonnegative");
  if (!(config_.forgetting > 0.0 && config_.forgetting <= 1.0))
    throw_invalid("weighted scheduler: forgetting factor must lie in (0, 1]");
}

void WeightedScheduler::reset(std::size_t dimension, SummaryKind kind) {
  if (dimension == 0) throw_invalid("scheduler: dimension must be positive");
  kind_ = kind;
  dimension_ = dimension;
  period_ = config_.update_period == 0 ? dimension : config_.update_period;
  steps_ = 0;
  frozen_ = false;
  version_ = 0;
  acc_ = VarianceAccumulator(dimension, config_.forgetting);
  q_ = SelectionWeights::uniform(dimension);
  dist_ = make_distribution(q_);
}

std::vector<double> WeightedScheduler::current_d_hat() const {
  // A variable without an estimate yet (fewer than two values, or no jump)
  // borrows the mean of the defined ones; reading it as zero would starve it
  // whenever lambda is small.
  const std::uint64_t needed = kind_ == SummaryKind::Value ? 2 : 1;
  auto d = kind_ == SummaryKind::Value ? acc_.d_hat_or_zero() : acc_.mean_or_zero();
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (acc_.count(i) >= needed) {
      sum += d[i];
      ++defined;
    }
  if (defined == d.size()) return d;
  const double fill = defined ? sum / static_cast<double>(defined) : 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (acc_.count(i) < needed) d[i] = fill;
  return d;
}

double WeightedScheduler::current_regularization() const {
  if (config_.regularization) return *config_.regularization;
  const auto d_hat = current_d_hat();
  double mean_root = 0.0;
  for (double v : d_hat) mean_root += std::sqrt(v);
  mean_root /= static_cast<double>(d_hat.size());
  return std::max(config_.relative_regularization * mean_root, config_.min_regularization);
}

void WeightedScheduler::refresh() {
  const auto d_hat = current_d_hat();
  double lambda = current_regularization();
  // An absolute lambda of zero is only usable while every estimate is positive.
  if (lambda == 0.0) {
    for (double v : d_hat)
      if (v == 0.0) {
        lambda = config_.min_regularization > 0.0 ? config_.min_regularization : 1e-8;
        break;
      }
  }
  q_ = compute_weights(d_hat, lambda);
  dist_ = make_distribution(q_);
  ++version_;
}

std::size_t WeightedScheduler::next(Rng& rng) {
  if (!frozen_) {
    if (steps_ == 0) {
      bool any_fed = false;
      for (std::size_t i = 0; i < dimension_ && !any_fed; ++i) any_fed = acc_.count(i) > 0;
      if (any_fed) refresh();
    } else if (steps_ % period_ == 0) {
      refresh();
    }
  }
  ++steps_;
  return dist_(rng);
}

void WeightedScheduler::observe(std::size_t index, double summary) {
  if (!frozen_) acc_.feed(index, summary);
}

void WeightedScheduler::on_burn_in_complete() {
  if (!config_.adapt_after_burn_in) frozen_ = true;
}

std::unique_ptr<Scheduler> WeightedScheduler::clone() const {
  return std::make_unique<WeightedScheduler>(*this);
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view name,
                                          const WeightedSchedulerConfig& weighted) {
  if (name == "systematic") return std::make_unique<SystematicScheduler>();
  if (name == "random") return std::make_unique<RandomScanScheduler>();
  if (name == "weighted") return std::make_unique<WeightedScheduler>(weighted);
  throw_invalid("unknown scheduler '" + std::string(name) + "'");
}

}  // namespace wgibbs
