#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace handpose {

/// Row-major pixel grid.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t size() const { return data.size(); }
  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  bool same_shape(int w, int h) const { return width == w && height == h; }
  template <typename U>
  bool same_shape(const Image<U>& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const Image&) const = default;
};

/// Depth in millimeters; 0 means no surface / undefined.
using DepthImage = Image<double>;

/// 1 = hand pixel, 0 = background.
using SilhouetteMask = Image<std::uint8_t>;

}  // namespace handpose
