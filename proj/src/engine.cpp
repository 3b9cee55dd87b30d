#include "wgibbs/engine.hpp"

#include <limits>

#include "wgibbs/error.hpp"

namespace wgibbs {

StateVector step(Model& model, const StateVector& state, std::size_t index, Rng& rng) {
  if (state.size() != model.dimension())
    throw_invalid("step: state dimension does not match model");
  if (index >= state.size()) throw_invalid("step: index out of range");
  StateVector next = state;
  next[index] = model.sample_conditional(state, index, rng);
  return next;
}

ChainTrace run_chain(Model& model, Scheduler& scheduler, const ChainConfig& config,
                     StateVector state, const SweepObserver& on_sweep) {
  const std::size_t d = model.dimension();
  if (d == 0) throw_invalid("run_chain: model dimension must be positive");
  if (state.size() != d) throw_invalid("run_chain: initial state dimension does not match model");
  if (config.total_iterations == 0) throw_invalid("run_chain: total_iterations must be positive");
  if (config.burn_in >= config.total_iterations)
    throw_invalid("run_chain: burn_in must be smaller than total_iterations");
  if (config.thinning == 0) throw_invalid("run_chain: thinning must be positive");
  if (d > std::numeric_limits<std::uint32_t>::max())
    throw_invalid("run_chain: dimension too large");

  Rng scan_rng(config.seed, Stream::Scheduler);
  Rng model_rng(config.seed, Stream::Model);
  scheduler.reset(d, model.summary_kind());

  ChainTrace trace;
  trace.dimension = d;
  trace.seed = config.seed;
  trace.thinning = config.thinning;
  trace.burn_in = config.burn_in;
  const auto rows = static_cast<Eigen::Index>(config.total_iterations / config.thinning);
  trace.samples.resize(rows, static_cast<Eigen::Index>(d));
  trace.selected_indices.reserve(config.total_iterations);

  const std::uint64_t sequential_steps = config.initial_sweeps * d;
  std::uint64_t last_version = 0;
  bool have_snapshot = false;
  Eigen::Index row = 0;

  for (std::uint64_t t = 1; t <= config.total_iterations; ++t) {
    if (t - 1 == config.burn_in && config.burn_in > 0) scheduler.on_burn_in_complete();

    std::size_t index;
    if (t <= sequential_steps) {
      index = systematic_next(t, d);
    } else {
      index = scheduler.next(scan_rng);
      if (index >= d) throw_invalid("run_chain: scheduler returned an out-of-range index");
    }

    if (const SelectionWeights* q = scheduler.weights()) {
      const auto version = scheduler.weights_version();
      if (!have_snapshot || version != last_version) {
        trace.weight_snapshots.push_back({t - 1, *q});
        last_version = version;
        have_snapshot = true;
      }
    }

    state[index] = model.sample_conditional(state, index, model_rng);
    scheduler.observe(index, model.scalar_summary(state, index));
    trace.selected_indices.push_back(static_cast<std::uint32_t>(index));

    if (t % config.thinning == 0 && row < rows) {
      for (std::size_t j = 0; j < d; ++j) trace.samples(row, static_cast<Eigen::Index>(j)) = state[j];
      ++row;
    }
    if (on_sweep && t % d == 0) on_sweep(t / d, state);
  }
  return trace;
}

}  // namespace wgibbs
