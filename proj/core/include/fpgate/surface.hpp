#pragma once

#include <vector>

#include "fpgate/image.hpp"
#include "fpgate/quality.hpp"

namespace fpgate {

enum class CoreKind { POINCARE, CENTROID_FALLBACK };

/// Anchor of the fingerprint-centric coordinate frame.
struct CorePoint {
  int x = 0;
  int y = 0;
  CoreKind kind = CoreKind::CENTROID_FALLBACK;
};

/// Per-pixel weight field in [0,1]; the transformed 3-d view of the print.
struct WeightedSurface {
  int width = 0;
  int height = 0;
  std::vector<double> z;  // row-major, each in [0,1]
  CorePoint core;
  double sigma = 0.0;

  double at(int x, int y) const { return z[static_cast<std::size_t>(y) * width + x]; }
};

// Poincare-index core search over the orientation field's 2x2 block loops.
// Candidate anchors are foreground blocks; the one whose loop index is
// closest to +1/2 wins (|index| >= 1/4 required). With no singular block
// the foreground centroid is returned as CENTROID_FALLBACK.
// Throws EmptyForeground when the mask has no set pixel.
CorePoint detect_core(const OrientationField& of, const ForegroundMask& mask);

// z(x,y) = E_norm(x,y) * coherence(block of (x,y)) * exp(-d^2 / (2 sigma^2))
// with E_norm the min-max normalized Sobel gradient energy and d the
// distance to the core. Identically zero gradient energy yields z == 0.
WeightedSurface to_surface(const GrayImage& img, const OrientationField& of,
                           const CorePoint& core, double sigma);

// Debug view of z scaled to [0,255].
GrayImage surface_to_image(const WeightedSurface& s);

}  // namespace fpgate
