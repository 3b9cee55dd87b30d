#pragma once

// Shared oracles for the unit tests.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/engine.hpp"

namespace wgibbs::testing {

// Joint table over binary variables (state index bit i = variable i), with
// exact single-site conditionals. Values are 0/1.
class TableModel final : public Model {
 public:
  TableModel(std::size_t variables, std::vector<double> weights)
      : d_(variables), p_(std::move(weights)) {
    const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
    for (auto& v : p_) v /= total;
  }

  std::size_t dimension() const override { return d_; }

  double sample_conditional(const StateVector& state, std::size_t index, Rng& rng) override {
    return rng.uniform() < prob_one(state, index) ? 1.0 : 0.0;
  }

  double prob_one(const StateVector& state, std::size_t index) const {
    std::size_t base = encode(state) & ~(std::size_t{1} << index);
    const double p0 = p_[base], p1 = p_[base | (std::size_t{1} << index)];
    return p1 / (p0 + p1);
  }

  std::unique_ptr<Model> clone() const override { return std::make_unique<TableModel>(*this); }

  static std::size_t encode(const StateVector& state) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < state.size(); ++i)
      if (state[i] != 0.0) s |= std::size_t{1} << i;
    return s;
  }

  const std::vector<double>& probabilities() const { return p_; }

 private:
  std::size_t d_;
  std::vector<double> p_;
};

inline double two_pass_variance(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return worst;
}

// Critical value of the two-sample KS test at significance 0.001.
inline double ks_critical_001(std::size_t n, std::size_t m) {
  return 1.949 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

// Binomial proportion half-width at z standard errors.
inline double binomial_band(double p, std::size_t n, double z = 3.0) {
  return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace wgibbs::testing
