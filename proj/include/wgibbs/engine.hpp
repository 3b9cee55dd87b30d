#pragma once

// Generic single-site Gibbs chain runner.
//
// A chain alternates two decisions per step: which variable to update (the
// Scheduler) and its new value (the Model's full conditional). Scan decisions
// and conditional draws use two independent substreams of the seed, so the
// same seed gives every scheduler the same model-noise stream.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wgibbs/rng.hpp"
#include "wgibbs/schedulers.hpp"

namespace wgibbs {

// Current chain state, one entry per schedulable variable.
using StateVector = std::vector<double>;

// Contract every sampled model fulfils.
//
// sample_conditional() is non-const: block models (LDA) keep latent detail
// such as token assignments internally and expose one scalar per block in
// the StateVector.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dimension() const = 0;

  // Draw variable `index` from its full conditional given `state` and return
  // the new coordinate value. Must not modify `state`.
  virtual double sample_conditional(const StateVector& state, std::size_t index, Rng& rng) = 0;

  // Per-variable scalar that feeds the weight estimate.
  virtual double scalar_summary(const StateVector& state, std::size_t index) const {
    return state[index];
  }

  virtual SummaryKind summary_kind() const { return SummaryKind::Value; }

  virtual std::optional<double> unnormalized_log_density(const StateVector&) const {
    return std::nullopt;
  }

  virtual std::unique_ptr<Model> clone() const = 0;
};

struct ChainConfig {
  std::uint64_t total_iterations = 0;  // single-variable steps
  std::uint64_t burn_in = 0;           // steps, < total_iterations
  std::uint64_t seed = 0;
  std::uint64_t thinning = 1;          // record the state every n-th step
  std::uint64_t initial_sweeps = 2;    // sequential passes before scheduling
};

struct WeightSnapshot {
  std::uint64_t step = 0;  // steps completed when the weights took effect
  SelectionWeights weights;
};

using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ChainTrace {
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  std::uint64_t thinning = 1;
  std::uint64_t burn_in = 0;
  // Row r holds the state after step (r + 1) * thinning.
  SampleMatrix samples;
  std::vector<std::uint32_t> selected_indices;
  std::vector<WeightSnapshot> weight_snapshots;

  // First recorded row at or after the burn-in boundary.
  std::size_t first_post_burn_in_row() const {
    return static_cast<std::size_t>((burn_in + thinning - 1) / thinning);
  }
};

// Called once per completed sweep (every `dimension` steps) with the
// one-based sweep number and the current state.
using SweepObserver = std::function<void(std::uint64_t sweep, const StateVector& state)>;

// One Gibbs update of coordinate `index`; every other coordinate is copied
// unchanged. Throws InvalidArgument for an out-of-range index.
StateVector step(Model& model, const StateVector& state, std::size_t index, Rng& rng);

// Runs total_iterations steps: the first initial_sweeps * d steps visit
// variables in order, the rest follow the scheduler. Every updated
// coordinate's summary is fed to the scheduler. Bit-reproducible for a
// given seed. Throws InvalidArgument on dimension mismatch, zero iterations
// or burn_in >= total_iterations.
ChainTrace run_chain(Model& model, Scheduler& scheduler, const ChainConfig& config,
                     StateVector initial_state, const SweepObserver& on_sweep = {});

}  // namespace wgibbs
