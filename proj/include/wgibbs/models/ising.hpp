#pragma once

// Binary image denoising with an Ising prior on a 4-neighbour grid.
//
// Posterior over spins x in {-1, +1}^(H*W) given the noisy image y:
//   p(x | y) ∝ exp( J * sum_{edges (i,j)} x_i x_j - sum_i (y_i - x_i)^2 / (2 sigma^2) )
// where the edge sum runs over unordered neighbour pairs. The single-site
// conditional is P(x_i = +1 | rest) = sigmoid(2 J sum_{j~i} x_j + 2 y_i / sigma^2).

#include <memory>

#include "wgibbs/engine.hpp"
#include "wgibbs/models/image.hpp"

namespace wgibbs {

struct IsingDenoiseTarget {
  Image observed;
  double coupling = 1.0;
  double sigma = 1.0;

  // Throws InvalidArgument for an empty image or nonpositive sigma.
  IsingDenoiseTarget(Image observed, double coupling, double sigma);

  std::size_t pixel_count() const { return observed.size(); }
  // Sum of the (up to four) grid neighbours of pixel `index`.
  double neighbour_sum(std::span<const double> spins, std::size_t index) const;
  double log_density(std::span<const double> spins) const;
};

// P(x_index = +1 | all other spins).
double ising_plus_probability(const IsingDenoiseTarget& target, std::span<const double> spins,
                              std::size_t index);

double ising_conditional(const IsingDenoiseTarget& target, std::span<const double> spins,
                         std::size_t index, Rng& rng);

// Y = X + N(0, sigma^2) elementwise. X must hold only -1 / +1.
Image corrupt_image(const Image& spins, double sigma, Rng& rng);

// +1 where the pixel exceeds the image median, -1 elsewhere.
Image binarize_median(const Image& gray);

// sign(y) with ties mapped to +1; the usual chain initial state.
Image sign_threshold(const Image& noisy);

// Deterministic test picture (face-like silhouette) as a spin image.
Image synthetic_spin_image(std::size_t height, std::size_t width);

class IsingModel final : public Model {
 public:
  explicit IsingModel(std::shared_ptr<const IsingDenoiseTarget> target);

  std::size_t dimension() const override { return target_->pixel_count(); }
  double sample_conditional(const StateVector& state, std::size_t index, Rng& rng) override;
  std::optional<double> unnormalized_log_density(const StateVector& state) const override;
  std::unique_ptr<Model> clone() const override;

  const IsingDenoiseTarget& target() const { return *target_; }

 private:
  std::shared_ptr<const IsingDenoiseTarget> target_;
};

}  // namespace wgibbs
