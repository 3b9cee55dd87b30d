#include "wgibbs/models/ising.hpp"

#include <algorithm>
#include <cmath>

#include "wgibbs/error.hpp"

namespace wgibbs {

IsingDenoiseTarget::IsingDenoiseTarget(Image observed_image, double coupling_strength,
                                       double noise_sigma)
    : observed(std::move(observed_image)), coupling(coupling_strength), sigma(noise_sigma) {
  if (observed.size() == 0 || observed.size() != observed.height * observed.width)
    throw_invalid("ising target: empty or malformed image");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw_invalid("ising target: sigma must be positive");
  if (!std::isfinite(coupling)) throw_invalid("ising target: coupling must be finite");
}

double IsingDenoiseTarget::neighbour_sum(std::span<const double> spins, std::size_t index) const {
  const std::size_t w = observed.width;
  const std::size_t r = index / w;
  const std::size_t c = index % w;
  double s = 0.0;
  if (r > 0) s += spins[index - w];
  if (r + 1 < observed.height) s += spins[index + w];
  if (c > 0) s += spins[index - 1];
  if (c + 1 < w) s += spins[index + 1];
  return s;
}

double IsingDenoiseTarget::log_density(std::span<const double> spins) const {
  const std::size_t h = observed.height;
  const std::size_t w = observed.width;
  double pair = 0.0;
  double fit = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      if (c + 1 < w) pair += spins[i] * spins[i + 1];
      if (r + 1 < h) pair += spins[i] * spins[i + w];
      const double e = observed.pixels[i] - spins[i];
      fit += e * e;
    }
  }
  return coupling * pair - fit / (2.0 * sigma * sigma);
}

double ising_plus_probability(const IsingDenoiseTarget& target, std::span<const double> spins,
                              std::size_t index) {
  const double field = 2.0 * target.coupling * target.neighbour_sum(spins, index) +
                       2.0 * target.observed.pixels[index] / (target.sigma * target.sigma);
  return 1.0 / (1.0 + std::exp(-field));
}

double ising_conditional(const IsingDenoiseTarget& target, std::span<const double> spins,
                         std::size_t index, Rng& rng) {
  return rng.uniform() < ising_plus_probability(target, spins, index) ? 1.0 : -1.0;
}

Image corrupt_image(const Image& spins, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw_invalid("corrupt_image: sigma must be nonnegative");
  Image out = spins;
  for (double& v : out.pixels) {
    if (v != 1.0 && v != -1.0) throw_invalid("corrupt_image: input must be a spin image");
    if (sigma > 0.0) v += sigma * rng.normal();
  }
  return out;
}

Image binarize_median(const Image& gray) {
  if (gray.size() == 0) throw_invalid("binarize_median: empty image");
  std::vector<double> sorted = gray.pixels;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  double median = *mid;
  if (sorted.size() % 2 == 0) median = 0.5 * (median + *std::max_element(sorted.begin(), mid));
  Image out(gray.height, gray.width, -1.0);
  bool any_plus = false;
  for (std::size_t i = 0; i < gray.size(); ++i)
    if (gray.pixels[i] > median) {
      out.pixels[i] = 1.0;
      any_plus = true;
    }
  // Median equal to the maximum (mostly-bright images): split at the median
  // from below instead so the result is not a constant image.
  if (!any_plus)
    for (std::size_t i = 0; i < gray.size(); ++i)
      out.pixels[i] = gray.pixels[i] >= median ? 1.0 : -1.0;
  return out;
}

Image sign_threshold(const Image& noisy) {
  Image out = noisy;
  for (double& v : out.pixels) v = v >= 0.0 ? 1.0 : -1.0;
  return out;
}

Image synthetic_spin_image(std::size_t height, std::size_t width) {
  Image img(height, width, -1.0);
  const double h = static_cast<double>(height);
  const double w = static_cast<double>(width);
  auto inside = [](double y, double x, double cy, double cx, double ry, double rx) {
    const double a = (y - cy) / ry;
    const double b = (x - cx) / rx;
    return a * a + b * b <= 1.0;
  };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / h;
      const double x = (static_cast<double>(c) + 0.5) / w;
      bool on = inside(y, x, 0.52, 0.5, 0.40, 0.32);            // head
      on = on || (y > 0.88 && std::fabs(x - 0.5) < 0.22);        // shoulders
      if (inside(y, x, 0.42, 0.37, 0.06, 0.07)) on = false;      // left eye
      if (inside(y, x, 0.42, 0.63, 0.06, 0.07)) on = false;      // right eye
      if (inside(y, x, 0.70, 0.5, 0.05, 0.15)) on = false;       // mouth
      if (y > 0.50 && y < 0.60 && std::fabs(x - 0.5) < 0.03) on = false;  // nose
      img(r, c) = on ? 1.0 : -1.0;
    }
  }
  return img;
}

IsingModel::IsingModel(std::shared_ptr<const IsingDenoiseTarget> target)
    : target_(std::move(target)) {
  if (!target_) throw_invalid("ising model: null target");
}

double IsingModel::sample_conditional(const StateVector& state, std::size_t index, Rng& rng) {
  return ising_conditional(*target_, state, index, rng);
}

std::optional<double> IsingModel::unnormalized_log_density(const StateVector& state) const {
  return target_->log_density(state);
}

std::unique_ptr<Model> IsingModel::clone() const { return std::make_unique<IsingModel>(*this); }

}  // namespace wgibbs
