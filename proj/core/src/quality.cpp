#include "fpgate/quality.hpp"

#include <algorithm>
#include <cmath>

#include "fpgate/errors.hpp"
#include "gradients.hpp"

namespace fpgate {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

OrientationField orientation_field(const GrayImage& img, int block) {
  if (block != 8 && block != 16 && block != 32)
    throw BadDimensions("orientation block must be 8, 16 or 32");

  std::vector<double> gx, gy;
  detail::sobel_gradients(img, gx, gy);

  OrientationField of;
  of.block = block;
  of.cols = (img.width + block - 1) / block;
  of.rows = (img.height + block - 1) / block;
  of.theta.assign(static_cast<std::size_t>(of.cols) * of.rows, 0.0);
  of.coherence.assign(of.theta.size(), 0.0);

  for (int by = 0; by < of.rows; ++by) {
    for (int bx = 0; bx < of.cols; ++bx) {
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      int y1 = std::min((by + 1) * block, img.height);
      int x1 = std::min((bx + 1) * block, img.width);
      for (int y = by * block; y < y1; ++y) {
        for (int x = bx * block; x < x1; ++x) {
          std::size_t i = static_cast<std::size_t>(y) * img.width + x;
          sxx += gx[i] * gx[i];
          syy += gy[i] * gy[i];
          sxy += gx[i] * gy[i];
        }
      }
      double denom = sxx + syy;
      std::size_t bi = static_cast<std::size_t>(by) * of.cols + bx;
      if (denom <= 0.0) continue;  // zero gradients: theta 0, coherence 0

      double a = sxx - syy;
      double b = 2.0 * sxy;
      // Dominant gradient direction; ridges run orthogonal to it.
      double phi = 0.5 * std::atan2(b, a);
      double theta = phi + kPi / 2.0;
      while (theta >= kPi) theta -= kPi;
      while (theta < 0.0) theta += kPi;
      of.theta[bi] = theta;
      of.coherence[bi] = std::sqrt(a * a + b * b) / denom;
    }
  }
  return of;
}

QualityReport assess(const GrayImage& img, const QualityConfig& cfg) {
  QualityReport rep;

  ForegroundMask mask = segment(img, cfg.block, cfg.seg_var_threshold);
  rep.foreground_ratio = mask.foreground_ratio();

  // Contrast: intensity std-dev over foreground pixels.
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    double p = img.pixels[i];
    sum += p;
    sum2 += p * p;
    ++n;
  }
  if (n > 0) {
    double m = sum / static_cast<double>(n);
    double var = sum2 / static_cast<double>(n) - m * m;
    rep.mean_contrast = var > 0.0 ? std::sqrt(var) : 0.0;
  }

  // Coherence: mean over foreground blocks. A block counts as foreground
  // when at least half of its mask pixels are set.
  OrientationField of = orientation_field(img, cfg.block);
  double csum = 0.0;
  int cblocks = 0;
  for (int by = 0; by < of.rows; ++by) {
    for (int bx = 0; bx < of.cols; ++bx) {
      int y1 = std::min((by + 1) * cfg.block, img.height);
      int x1 = std::min((bx + 1) * cfg.block, img.width);
      int set = 0, total = 0;
      for (int y = by * cfg.block; y < y1; ++y)
        for (int x = bx * cfg.block; x < x1; ++x) {
          set += mask.at(x, y);
          ++total;
        }
      if (total > 0 && 2 * set >= total) {
        csum += of.coherence_at(bx, by);
        ++cblocks;
      }
    }
  }
  if (cblocks > 0) rep.mean_coherence = csum / cblocks;

  if (rep.foreground_ratio < cfg.min_foreground) rep.reasons.push_back(kLowForeground);
  if (rep.mean_contrast < cfg.min_contrast) rep.reasons.push_back(kLowContrast);
  if (rep.mean_coherence < cfg.min_coherence) rep.reasons.push_back(kLowCoherence);
  rep.accepted = rep.reasons.empty();
  return rep;
}

}  // namespace fpgate
