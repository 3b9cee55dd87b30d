#pragma once

// Exact checks on small instances:
//   * stationarity of any random scan with fixed q on a finite state space,
//     via the augmented chain over (state, variable index);
//   * the scan objective sum_i d_i / q_i and its numeric minimiser;
//   * k-step expected squared jump distance under independent coordinates,
//     in closed form and by simulation.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/rng.hpp"
#include "wgibbs/schedulers.hpp"

namespace wgibbs {

// Single-site Gibbs kernels for a joint distribution over a product of small
// discrete domains. States are enumerated in mixed radix with variable 0 as
// the fastest-changing digit.
struct FiniteChainSpec {
  std::vector<std::size_t> cardinalities;
  Eigen::VectorXd target;                  // pi over the enumerated states
  std::vector<Eigen::MatrixXd> kernels;    // one |Omega| x |Omega| matrix per variable
  SelectionWeights q = SelectionWeights::uniform(1);

  std::size_t state_count() const { return static_cast<std::size_t>(target.size()); }
  std::size_t variable_count() const { return cardinalities.size(); }

  // Digits of enumerated state `s`.
  std::vector<std::size_t> decode(std::size_t s) const;
};

// Builds the exact Gibbs kernel of every variable from a strictly positive
// target. Throws InvalidArgument on shape mismatch or nonpositive mass.
FiniteChainSpec make_gibbs_chain(std::vector<std::size_t> cardinalities,
                                 Eigen::VectorXd target, SelectionWeights q);

// Random strictly positive target over random small domains (|Omega| <= max_states,
// at most max_variables variables) with random strictly positive q.
FiniteChainSpec random_finite_chain(Rng& rng, std::size_t max_states = 16,
                                    std::size_t max_variables = 3);

struct AugmentedChain {
  Eigen::MatrixXd transition;  // P((x,i),(y,j)) = q_j P_i(x,y); row index i*|Omega| + x
  Eigen::VectorXd candidate;   // q_i pi(x)
};

AugmentedChain augment(const FiniteChainSpec& spec);

// max | candidate^T P - candidate^T | over the augmented space.
// Throws Numeric if a kernel is not row-stochastic or does not preserve pi
// (tolerance 1e-12).
double stationarity_residual(const FiniteChainSpec& spec);

// sum_i d_i / q_i. Throws InvalidArgument on size mismatch or negative d.
double scan_objective(std::span<const double> q, std::span<const double> d);

// sum_i (1 - (1 - q_i)^k) d_i.
double esjd_closed_form(std::span<const double> q, std::span<const double> d, std::uint64_t k);

// sum_i d_i (1 - q_i) / q_i: the infinite-lag sum of the unvisited mass,
// sum_{k>=1} sum_i (1 - q_i)^k d_i, evaluated exactly.
double unvisited_series_exact(std::span<const double> q, std::span<const double> d);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Simulates k steps of a random scan over independent Gaussian coordinates
// with Var(x_i) = d_i / 2 (so a visited coordinate has expected squared jump
// d_i) and averages ||x^{t+k} - x^t||^2 over `trials` replicas.
MonteCarloEstimate esjd_monte_carlo(std::span<const double> q, std::span<const double> d,
                                    std::uint64_t k, std::uint64_t trials, Rng& rng);

struct OptimizerResult {
  SelectionWeights q = SelectionWeights::uniform(1);
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Minimises sum_i d_i / q_i over the open simplex with a damped Newton
// method in softmax coordinates (the objective is convex there). Stops at
// gradient norm <= tolerance. Throws InvalidArgument for nonpositive d.
OptimizerResult optimal_weights_numeric(std::span<const double> d, double tolerance = 1e-10,
                                        int max_iterations = 200);

}  // namespace wgibbs
