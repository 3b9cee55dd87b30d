#pragma once

#include <cstdint>
#include <random>

namespace wgibbs {

// Named substreams derived from one user seed. The chain engine draws scan
// decisions and conditional samples from separate streams, so swapping the
// scheduler never perturbs the model noise.
enum class Stream : std::uint64_t {
  Scheduler = 0,
  Model = 1,
  Init = 2,
  Data = 3,
  Evaluation = 4,
};

// Seedable generator (mt19937_64 keyed by splitmix64 of seed and stream id).
// Copyable; copies continue the same sequence independently.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, Stream stream)
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  double gamma(double shape);

  // Child generator for an independent sub-task (e.g. one trial of many).
  Rng split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace wgibbs
