#include "wgibbs/validation.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "wgibbs/error.hpp"

namespace wgibbs {

std::vector<std::size_t> FiniteChainSpec::decode(std::size_t s) const {
  std::vector<std::size_t> digits(cardinalities.size());
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    digits[i] = s % cardinalities[i];
    s /= cardinalities[i];
  }
  return digits;
}

FiniteChainSpec make_gibbs_chain(std::vector<std::size_t> cardinalities, Eigen::VectorXd target,
                                 SelectionWeights q) {
  if (cardinalities.empty()) throw_invalid("finite chain: no variables");
  std::size_t states = 1;
  for (auto c : cardinalities) {
    if (c == 0) throw_invalid("finite chain: empty variable domain");
    states *= c;
  }
  if (static_cast<std::size_t>(target.size()) != states)
    throw_invalid("finite chain: target size does not match state space");
  if (q.size() != cardinalities.size())
    throw_invalid("finite chain: selection weights do not match variable count");
  if ((target.array() <= 0.0).any()) throw_invalid("finite chain: target must be strictly positive");
  target /= target.sum();

  FiniteChainSpec spec{std::move(cardinalities), std::move(target), {}, std::move(q)};
  const auto S = static_cast<Eigen::Index>(states);
  std::size_t stride = 1;
  for (std::size_t i = 0; i < spec.cardinalities.size(); ++i) {
    const std::size_t card = spec.cardinalities[i];
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(S, S);
    for (std::size_t x = 0; x < states; ++x) {
      const std::size_t digit = (x / stride) % card;
      const std::size_t base = x - digit * stride;
      double mass = 0.0;
      for (std::size_t v = 0; v < card; ++v) mass += spec.target[static_cast<Eigen::Index>(base + v * stride)];
      for (std::size_t v = 0; v < card; ++v) {
        const auto y = static_cast<Eigen::Index>(base + v * stride);
        kernel(static_cast<Eigen::Index>(x), y) = spec.target[y] / mass;
      }
    }
    spec.kernels.push_back(std::move(kernel));
    stride *= card;
  }
  return spec;
}

FiniteChainSpec random_finite_chain(Rng& rng, std::size_t max_states, std::size_t max_variables) {
  if (max_states < 2 || max_variables == 0) throw_invalid("random_finite_chain: space too small");
  std::vector<std::size_t> cards;
  std::size_t states = 1;
  const std::size_t vars = 1 + static_cast<std::size_t>(rng() % max_variables);
  for (std::size_t i = 0; i < vars; ++i) {
    const std::size_t room = max_states / states;
    if (room < 2) break;
    const std::size_t card = 2 + static_cast<std::size_t>(rng() % std::min<std::size_t>(room - 1, 3));
    cards.push_back(card);
    states *= card;
  }
  Eigen::VectorXd target(static_cast<Eigen::Index>(states));
  for (Eigen::Index s = 0; s < target.size(); ++s) target[s] = 0.02 + rng.uniform();
  std::vector<double> q(cards.size());
  double total = 0.0;
  for (auto& v : q) total += (v = 0.05 + rng.uniform());
  for (auto& v : q) v /= total;
  // Renormalise once more so the sum is within rounding of one.
  total = 0.0;
  for (auto v : q) total += v;
  for (auto& v : q) v /= total;
  return make_gibbs_chain(std::move(cards), std::move(target), SelectionWeights(std::move(q)));
}

AugmentedChain augment(const FiniteChainSpec& spec) {
  const auto S = static_cast<Eigen::Index>(spec.state_count());
  const auto d = static_cast<Eigen::Index>(spec.variable_count());
  AugmentedChain out;
  out.transition = Eigen::MatrixXd::Zero(S * d, S * d);
  out.candidate.resize(S * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.candidate.segment(i * S, S) = spec.q[static_cast<std::size_t>(i)] * spec.target;
    for (Eigen::Index j = 0; j < d; ++j)
      out.transition.block(i * S, j * S, S, S) =
          spec.q[static_cast<std::size_t>(j)] * spec.kernels[static_cast<std::size_t>(i)];
  }
  return out;
}

double stationarity_residual(const FiniteChainSpec& spec) {
  constexpr double kTol = 1e-12;
  if (spec.kernels.size() != spec.variable_count())
    throw_invalid("stationarity_residual: one kernel per variable required");
  for (const auto& kernel : spec.kernels) {
    if (kernel.rows() != spec.target.size() || kernel.cols() != spec.target.size())
      throw_invalid("stationarity_residual: kernel shape mismatch");
    if ((kernel.array() < 0.0).any() ||
        ((kernel.rowwise().sum().array() - 1.0).abs() > kTol).any())
      throw_numeric("stationarity_residual: kernel is not row-stochastic");
    const Eigen::RowVectorXd moved = spec.target.transpose() * kernel;
    if ((moved - spec.target.transpose()).cwiseAbs().maxCoeff() > kTol)
      throw_numeric("stationarity_residual: kernel does not preserve the target");
  }
  const auto chain = augment(spec);
  const Eigen::RowVectorXd moved = chain.candidate.transpose() * chain.transition;
  return (moved - chain.candidate.transpose()).cwiseAbs().maxCoeff();
}

double scan_objective(std::span<const double> q, std::span<const double> d) {
  if (q.size() != d.size() || q.empty()) throw_invalid("scan_objective: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (d[i] < 0.0) throw_invalid("scan_objective: d must be nonnegative");
    if (d[i] == 0.0) continue;
    if (q[i] <= 0.0) throw_invalid("scan_objective: zero selection probability with positive d");
    total += d[i] / q[i];
  }
  return total;
}

double esjd_closed_form(std::span<const double> q, std::span<const double> d, std::uint64_t k) {
  if (q.size() != d.size()) throw_invalid("esjd_closed_form: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    total += (1.0 - std::pow(1.0 - q[i], static_cast<double>(k))) * d[i];
  return total;
}

double unvisited_series_exact(std::span<const double> q, std::span<const double> d) {
  if (q.size() != d.size()) throw_invalid("unvisited_series_exact: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) total += d[i] * (1.0 - q[i]) / q[i];
  return total;
}

MonteCarloEstimate esjd_monte_carlo(std::span<const double> q, std::span<const double> d,
                                    std::uint64_t k, std::uint64_t trials, Rng& rng) {
  if (q.size() != d.size() || q.empty()) throw_invalid("esjd_monte_carlo: size mismatch");
  if (trials < 2) throw_invalid("esjd_monte_carlo: need at least two trials");
  std::discrete_distribution<std::size_t> pick(q.begin(), q.end());
  std::vector<double> sd(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0) throw_invalid("esjd_monte_carlo: d must be nonnegative");
    sd[i] = std::sqrt(d[i] / 2.0);
  }
  std::vector<double> start(d.size()), x(d.size());
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < d.size(); ++i) start[i] = sd[i] * rng.normal();
    x = start;
    for (std::uint64_t s = 0; s < k; ++s) {
      const auto i = pick(rng);
      x[i] = sd[i] * rng.normal();
    }
    double jump = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) jump += (x[i] - start[i]) * (x[i] - start[i]);
    const double delta = jump - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (jump - mean);
  }
  const double var = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

OptimizerResult optimal_weights_numeric(std::span<const double> d, double tolerance,
                                        int max_iterations) {
  if (d.empty()) throw_invalid("optimal_weights_numeric: empty d");
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd dv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = d[static_cast<std::size_t>(i)];
    if (!(v > 0.0) || !std::isfinite(v)) throw_invalid("optimal_weights_numeric: d must be positive");
    dv[i] = v;
  }

  // Softmax coordinates, normalised so that q = exp(theta) after each step.
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, -std::log(static_cast<double>(n)));
  auto normalise = [](Eigen::VectorXd& th) {
    const double top = th.maxCoeff();
    th.array() -= top + std::log((th.array() - top).exp().sum());
  };
  auto objective = [&](const Eigen::VectorXd& th) { return (dv.array() * (-th.array()).exp()).sum(); };

  OptimizerResult result;
  Eigen::VectorXd q = theta.array().exp();
  double f = objective(theta);
  Eigen::VectorXd grad(n);
  for (int it = 0; it < max_iterations; ++it) {
    grad = q.array() * f - dv.array() / q.array();
    result.gradient_norm = grad.norm();
    result.iterations = it;
    if (result.gradient_norm <= tolerance) break;

    Eigen::MatrixXd hess = -(q * (dv.array() / q.array()).matrix().transpose());
    hess += hess.transpose().eval();
    hess.diagonal().array() += q.array() * f + dv.array() / q.array();
    // The objective is invariant along the all-ones direction; pin it.
    hess.array() += 1.0;
    Eigen::VectorXd direction = hess.ldlt().solve(-grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      direction = -grad;
      slope = -grad.squaredNorm();
    }

    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = theta + step * direction;
      normalise(trial);
      const double ft = objective(trial);
      if (ft <= f + 1e-4 * step * slope || (ft < f)) {
        theta = trial;
        f = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    q = theta.array().exp();
    f = objective(theta);
    if (!moved) {
      result.iterations = it + 1;
      grad = q.array() * f - dv.array() / q.array();
      result.gradient_norm = grad.norm();
      break;
    }
  }

  std::vector<double> qv(q.data(), q.data() + n);
  double total = 0.0;
  for (double v : qv) total += v;
  for (double& v : qv) v /= total;
  result.q = SelectionWeights(std::move(qv));
  result.objective = scan_objective(result.q.values(), d);
  return result;
}

}  // namespace wgibbs
