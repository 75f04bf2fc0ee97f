#include "fpgate/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpgate/errors.hpp"
#include "gradients.hpp"

namespace fpgate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Orientation difference wrapped into (-pi/2, pi/2].
double wrap_half(double d) {
  while (d > kPi / 2.0) d -= kPi;
  while (d <= -kPi / 2.0) d += kPi;
  return d;
}

}  // namespace

CorePoint detect_core(const OrientationField& of, const ForegroundMask& mask) {
  int block = of.block;

  // Block-level foreground: at least half of the block's pixels set.
  auto block_foreground = [&](int bx, int by) {
    int x1 = std::min((bx + 1) * block, mask.width);
    int y1 = std::min((by + 1) * block, mask.height);
    int set = 0, total = 0;
    for (int y = by * block; y < y1; ++y)
      for (int x = bx * block; x < x1; ++x) {
        set += mask.at(x, y);
        ++total;
      }
    return total > 0 && 2 * set >= total;
  };

  bool any_fg = false;
  for (auto b : mask.bits)
    if (b) {
      any_fg = true;
      break;
    }
  if (!any_fg) throw EmptyForeground("mask has no foreground pixel");

  double best_dist = std::numeric_limits<double>::infinity();
  int best_bx = -1, best_by = -1;
  for (int by = 0; by + 1 < of.rows; ++by) {
    for (int bx = 0; bx + 1 < of.cols; ++bx) {
      if (!block_foreground(bx, by)) continue;
      // 2x2 loop: (bx,by) -> (bx+1,by) -> (bx+1,by+1) -> (bx,by+1) -> back.
      double t0 = of.theta_at(bx, by);
      double t1 = of.theta_at(bx + 1, by);
      double t2 = of.theta_at(bx + 1, by + 1);
      double t3 = of.theta_at(bx, by + 1);
      double sum = wrap_half(t1 - t0) + wrap_half(t2 - t1) +
                   wrap_half(t3 - t2) + wrap_half(t0 - t3);
      double index = sum / (2.0 * kPi);
      if (std::abs(index) < 0.25) continue;
      double dist = std::abs(index - 0.5);
      if (dist < best_dist) {
        best_dist = dist;
        best_bx = bx;
        best_by = by;
      }
    }
  }

  CorePoint core;
  if (best_bx >= 0) {
    core.kind = CoreKind::POINCARE;
    core.x = std::min(best_bx * block + block / 2, mask.width - 1);
    core.y = std::min(best_by * block + block / 2, mask.height - 1);
    return core;
  }

  // No singular block: foreground centroid.
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
  core.kind = CoreKind::CENTROID_FALLBACK;
  core.x = static_cast<int>(std::lround(sx / static_cast<double>(n)));
  core.y = static_cast<int>(std::lround(sy / static_cast<double>(n)));
  return core;
}

WeightedSurface to_surface(const GrayImage& img, const OrientationField& of,
                           const CorePoint& core, double sigma) {
  if (sigma <= 0.0) throw BadDimensions("surface sigma must be positive");

  std::vector<double> gx, gy;
  detail::sobel_gradients(img, gx, gy);

  std::size_t n = gx.size();
  std::vector<double> energy(n);
  double emin = std::numeric_limits<double>::infinity();
  double emax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    energy[i] = gx[i] * gx[i] + gy[i] * gy[i];
    emin = std::min(emin, energy[i]);
    emax = std::max(emax, energy[i]);
  }

  WeightedSurface s;
  s.width = img.width;
  s.height = img.height;
  s.core = core;
  s.sigma = sigma;
  s.z.assign(n, 0.0);
  if (emax <= emin) return s;  // flat energy field, z == 0

  double escale = 1.0 / (emax - emin);
  double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      double enorm = (energy[i] - emin) * escale;
      double coh = of.coherence_at_pixel(x, y);
      double dx = x - core.x, dy = y - core.y;
      s.z[i] = enorm * coh * std::exp(-(dx * dx + dy * dy) * inv2s2);
    }
  }
  return s;
}

GrayImage surface_to_image(const WeightedSurface& s) {
  GrayImage img(s.width, s.height);
  for (std::size_t i = 0; i < s.z.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(s.z[i] * 255.0), 0L, 255L));
  return img;
}

}  // namespace fpgate
