#include <cmath>
#include <cstdio>
#include <ostream>

#include "wgibbs/experiment.hpp"
#include "wgibbs/validation.hpp"

namespace wgibbs {

ValidationSummary run_validation(std::size_t theorem_trials, std::size_t lemma_trials, std::uint64_t seed,
                                 std::ostream* log) {
  constexpr double kResidualTol = 1e-10;
  constexpr double kWeightTol = 1e-6;
  constexpr double kObjectiveTol = 1e-9;
  char line[256];
  ValidationSummary s;

  Rng chains(seed, Stream::Data);
  for (std::size_t t = 0; t < theorem_trials; ++t) {
    const auto spec = random_finite_chain(chains);
    const double r = stationarity_residual(spec);
    s.max_stationarity_residual = std::max(s.max_stationarity_residual, r);
    ++s.theorem_trials;
    if (log) {
      std::snprintf(line, sizeof line, "stationarity %zu states=%zu vars=%zu residual=%.3e\n", t,
                    spec.state_count(), spec.variable_count(), r);
      *log << line;
    }
  }

  Rng vectors = Rng(seed, Stream::Data).split(2);
  for (std::size_t t = 0; t < lemma_trials; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(vectors() % 9);
    std::vector<double> d(n);
    // log-uniform over [0.01, 100]
    for (auto& v : d) v = std::pow(10.0, -2.0 + 4.0 * vectors.uniform());
    const auto numeric = optimal_weights_numeric(d);
    const auto analytic = compute_weights(d, 0.0);
    double werr = 0.0;
    for (std::size_t i = 0; i < n; ++i) werr = std::max(werr, std::abs(numeric.q[i] - analytic[i]));
    double root_sum = 0.0;
    for (double v : d) root_sum += std::sqrt(v);
    const double bound = root_sum * root_sum;
    const double oerr = std::abs(scan_objective(analytic.values(), d) - bound) / bound;
    const double nerr = std::abs(numeric.objective - bound) / bound;
    s.max_weight_error = std::max(s.max_weight_error, werr);
    s.max_objective_relative_error = std::max({s.max_objective_relative_error, oerr, nerr});
    ++s.lemma_trials;
    if (log) {
      std::snprintf(line, sizeof line, "optimal-weights %zu dim=%zu max|q-q*|=%.3e objective-rel-err=%.3e\n", t, n,
                    werr, std::max(oerr, nerr));
      *log << line;
    }
  }

  s.passed = s.max_stationarity_residual <= kResidualTol && s.max_weight_error <= kWeightTol &&
             s.max_objective_relative_error <= kObjectiveTol;
  if (log) {
    std::snprintf(line, sizeof line,
                  "summary stationarity max=%.3e (tol %.0e) weights max=%.3e (tol %.0e) objective max=%.3e (tol %.0e) %s\n",
                  s.max_stationarity_residual, kResidualTol, s.max_weight_error, kWeightTol,
                  s.max_objective_relative_error, kObjectiveTol, s.passed ? "PASS" : "FAIL");
    *log << line;
  }
  return s;
}

}  // namespace wgibbs
