#pragma once

#include <cstddef>
#include <vector>

namespace wgibbs {

// Row-major H x W matrix of real pixel values. Spin images hold -1 / +1.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0)
      : height(h), width(w), pixels(h * w, fill) {}

  std::size_t size() const { return pixels.size(); }
  double& operator()(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
  double operator()(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }

  friend bool operator==(const Image&, const Image&) = default;
};

}  // namespace wgibbs
