#pragma once

#include <cstdint>
#include <vector>

namespace fpgate {

/// Row-major real-valued raster.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int w, int h, double fill = 0.0)
      : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return v.size(); }
};

/// Row-major binary raster (1 = set).
struct BitGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BitGrid() = default;
  BitGrid(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  // Out-of-bounds reads count as background.
  std::uint8_t get(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return 0;
    return bits[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const BitGrid&) const = default;
};

}  // namespace fpgate
