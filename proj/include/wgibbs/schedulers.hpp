#pragma once

// Scan schedulers: which variable the Gibbs chain updates next.
//
// Three strategies are provided:
//   * SystematicScheduler  - fixed cyclic order 0, 1, ..., d-1, 0, ...
//   * RandomScanScheduler  - iid draws from a fixed selection vector q
//                            (uniform by default)
//   * WeightedScheduler    - iid draws from q_i proportional to
//                            sqrt(d_hat_i) + lambda, where d_hat_i is an
//                            online estimate of twice the marginal variance
//                            of variable i, refreshed every k steps.
//
// Variable indices are zero-based throughout the C++ API.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wgibbs/rng.hpp"

namespace wgibbs {

// How a model's per-variable summary feeds the weight estimate.
//   Value:       summaries are coordinate values; d_hat = 2 * variance.
//   SquaredJump: summaries are already squared displacements between
//                consecutive visits; d_hat = their running mean.
enum class SummaryKind { Value, SquaredJump };

// Probability vector over variables. Always strictly positive and summing to
// one within 1e-12.
class SelectionWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws InvalidArgument unless every entry is finite and > 0 and the sum
  // is within kSumTolerance of one.
  explicit SelectionWeights(std::vector<double> q);

  static SelectionWeights uniform(std::size_t d);

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }
  std::span<const double> values() const { return q_; }

  friend bool operator==(const SelectionWeights&, const SelectionWeights&) = default;

 private:
  std::vector<double> q_;
};

// Online per-variable moments (Welford). With forgetting < 1 older
// observations are down-weighted geometrically; forgetting == 1 keeps the
// full history.
class VarianceAccumulator {
 public:
  explicit VarianceAccumulator(std::size_t dimension = 0, double forgetting = 1.0);

  void feed(std::size_t index, double value);

  std::size_t dimension() const { return count_.size(); }
  std::uint64_t count(std::size_t i) const { return count_[i]; }
  double mean(std::size_t i) const { return mean_[i]; }
  double sum_squared_deviations(std::size_t i) const { return ssd_[i]; }

  // Twice the (weighted) population variance; empty when fewer than two
  // values have been fed.
  std::optional<double> d_hat(std::size_t i) const;

  // d_hat for every variable, undefined entries reported as zero.
  std::vector<double> d_hat_or_zero() const;

  // Running mean for every variable, unfed entries reported as zero.
  std::vector<double> mean_or_zero() const;

 private:
  double forgetting_;
  std::vector<std::uint64_t> count_;
  std::vector<double> weight_;
  std::vector<double> mean_;
  std::vector<double> ssd_;
};

// ((t - 1) mod d) for a one-based step counter t >= 1.
std::size_t systematic_next(std::uint64_t t, std::size_t d);

// Draw index i with probability q[i].
std::size_t categorical_next(Rng& rng, const SelectionWeights& q);

// q_i = (sqrt(d_hat_i) + lambda) / sum_j (sqrt(d_hat_j) + lambda).
// Throws InvalidArgument for negative / non-finite entries, negative lambda,
// or lambda == 0 with any zero entry.
SelectionWeights compute_weights(std::span<const double> d_hat, double lambda);

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual std::string_view name() const = 0;

  // Prepare for a fresh chain over `dimension` variables.
  virtual void reset(std::size_t dimension, SummaryKind kind) = 0;

  virtual std::size_t next(Rng& rng) = 0;

  // Summary of a freshly updated variable. Called for every step, including
  // the initial sequential sweeps.
  virtual void observe(std::size_t /*index*/, double /*summary*/) {}

  virtual void on_burn_in_complete() {}

  // Current selection probabilities, or nullptr for deterministic scans.
  virtual const SelectionWeights* weights() const { return nullptr; }

  // Incremented whenever weights() changes.
  virtual std::uint64_t weights_version() const { return 0; }

  virtual std::unique_ptr<Scheduler> clone() const = 0;
};

class SystematicScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "systematic"; }
  void reset(std::size_t dimension, SummaryKind kind) override;
  std::size_t next(Rng& rng) override;
  std::unique_ptr<Scheduler> clone() const override;

 private:
  std::size_t dimension_ = 0;
  std::uint64_t t_ = 0;
};

// Random scan with constant selection probabilities.
class RandomScanScheduler final : public Scheduler {
 public:
  // Uniform q, sized on reset().
  RandomScanScheduler() = default;
  explicit RandomScanScheduler(SelectionWeights q);

  std::string_view name() const override { return "random"; }
  void reset(std::size_t dimension, SummaryKind kind) override;
  std::size_t next(Rng& rng) override;
  const SelectionWeights* weights() const override { return q_ ? &*q_ : nullptr; }
  std::unique_ptr<Scheduler> clone() const override;

 private:
  bool fixed_ = false;
  std::optional<SelectionWeights> q_;
  std::discrete_distribution<std::size_t> dist_;
};

struct WeightedSchedulerConfig {
  // Steps between weight refreshes; 0 means "dimension" (once per sweep).
  std::uint64_t update_period = 0;
  // Absolute lambda. When empty, lambda is relative_regularization times the
  // mean of sqrt(d_hat), floored at min_regularization, at every refresh.
  // With the default factor of 1 every q_i is at least 1/(2d).
  std::optional<double> regularization;
  double relative_regularization = 1.0;
  double min_regularization = 1e-8;
  // When false, weights are frozen once burn-in completes.
  bool adapt_after_burn_in = true;
  // Exponential forgetting for the variance accumulator (1 = off).
  double forgetting = 1.0;
};

// Adaptive weighted scan. Starts from uniform q; the first draw after the
// initial sweeps uses weights computed from the summaries seen so far, and
// every update_period steps afterwards q is recomputed.
class WeightedScheduler final : public Scheduler {
 public:
  explicit WeightedScheduler(WeightedSchedulerConfig config = {});

  std::string_view name() const override { return "weighted"; }
  void reset(std::size_t dimension, SummaryKind kind) override;
  std::size_t next(Rng& rng) override;
  void observe(std::size_t index, double summary) override;
  void on_burn_in_complete() override;
  const SelectionWeights* weights() const override { return &q_; }
  std::uint64_t weights_version() const override { return version_; }
  std::unique_ptr<Scheduler> clone() const override;

  const WeightedSchedulerConfig& config() const { return config_; }
  const VarianceAccumulator& accumulator() const { return acc_; }

  // d_hat as currently fed to compute_weights; variables without an estimate
  // yet take the mean of the defined entries.
  std::vector<double> current_d_hat() const;
  // Lambda that the next refresh would use.
  double current_regularization() const;

 private:
  void refresh();

  WeightedSchedulerConfig config_;
  SummaryKind kind_ = SummaryKind::Value;
  std::size_t dimension_ = 0;
  std::uint64_t period_ = 1;
  std::uint64_t steps_ = 0;
  bool frozen_ = false;
  std::uint64_t version_ = 0;
  VarianceAccumulator acc_;
  SelectionWeights q_ = SelectionWeights::uniform(1);
  std::discrete_distribution<std::size_t> dist_;
};

// "systematic", "random" or "weighted".
std::unique_ptr<Scheduler> make_scheduler(std::string_view name,
                                          const WeightedSchedulerConfig& weighted = {});

}  // namespace wgibbs
