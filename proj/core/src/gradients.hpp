#pragma once

// Internal: shared Sobel stencil (edge replication) for quality and
// surface computations.

#include <algorithm>
#include <vector>

#include "fpgate/image.hpp"

namespace fpgate::detail {

inline void sobel_gradients(const GrayImage& img, std::vector<double>& gx,
                            std::vector<double>& gy) {
  int w = img.width, h = img.height;
  gx.assign(static_cast<std::size_t>(w) * h, 0.0);
  gy.assign(static_cast<std::size_t>(w) * h, 0.0);
  auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
  auto px = [&](int x, int y) -> double {
    return img.at(clampi(x, 0, w - 1), clampi(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double p00 = px(x - 1, y - 1), p10 = px(x, y - 1), p20 = px(x + 1, y - 1);
      double p01 = px(x - 1, y), p21 = px(x + 1, y);
      double p02 = px(x - 1, y + 1), p12 = px(x, y + 1), p22 = px(x + 1, y + 1);
      std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = (p20 + 2.0 * p21 + p22) - (p00 + 2.0 * p01 + p02);
      gy[i] = (p02 + 2.0 * p12 + p22) - (p00 + 2.0 * p10 + p20);
    }
  }
}

}  // namespace fpgate::detail
