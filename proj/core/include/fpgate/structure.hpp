#pragma once

#include <vector>

#include "fpgate/grid.hpp"
#include "fpgate/image.hpp"

namespace fpgate {

enum class MinutiaKind { ENDING, BIFURCATION };

struct Minutia {
  int x = 0;
  int y = 0;
  double theta = 0.0;  // radians, [0, 2pi), direction of the adjacent segment
  MinutiaKind kind = MinutiaKind::ENDING;

  bool operator==(const Minutia&) const = default;
};

/// Subunit-4 embedding of the skeleton: minutiae plus coarse shape counts.
struct StructuralFeature {
  std::vector<Minutia> minutiae;
  int n_curves = 0;
  int n_lines = 0;
  // [n_curves, n_lines, n_endings, n_bifurcations, mean NN minutia
  // distance], each min-max scaled into [0,1] by the configured caps.
  std::vector<double> embed;

  bool operator==(const StructuralFeature&) const = default;
};

struct StructureConfig {
  int block = 16;
  int border = 8;                     // exclusion zone, px
  double curvature_threshold = 0.15;  // rad per traced pixel
  double count_cap = 64.0;            // embed scaling bounds
  double dist_cap = 64.0;
};

// Ridges are dark: a pixel is ridge iff it is strictly below its block's
// mean intensity and inside the mask.
BitGrid binarize(const GrayImage& img, const ForegroundMask& mask, int block);

// Zhang-Suen iterative thinning to fixpoint (idempotent by construction).
BitGrid thin(const BitGrid& bin);

// Crossing number over the 8-neighborhood cycle: CN=1 -> ENDING,
// CN=3 -> BIFURCATION. Minutiae within `border` px of the grid boundary
// are discarded. theta is the direction of the adjacent skeleton segment
// traced up to 5 px.
std::vector<Minutia> extract_minutiae(const BitGrid& skeleton, int border);

// Per 8-connected component: mean absolute turning angle per traced pixel;
// above the threshold counts as a curve, otherwise a line.
std::pair<int, int> ridge_shape_stats(const BitGrid& skeleton,
                                      double curvature_threshold);

// binarize -> thin -> extract_minutiae + ridge_shape_stats -> embed.
// Minutiae within `border` px of the mask boundary are discarded as well.
StructuralFeature structural_feature(const GrayImage& img,
                                     const ForegroundMask& mask,
                                     const StructureConfig& cfg = {});

}  // namespace fpgate
