#pragma once

#include <string>
#include <vector>

#include "fpgate/image.hpp"

namespace fpgate {

/// Per-block ridge orientation (radians, [0, pi)) with a coherence
/// confidence in [0,1]. Grid dims are ceil(image dims / block).
struct OrientationField {
  int block = 0;
  int cols = 0;
  int rows = 0;
  std::vector<double> theta;
  std::vector<double> coherence;

  double theta_at(int bx, int by) const { return theta[static_cast<std::size_t>(by) * cols + bx]; }
  double coherence_at(int bx, int by) const { return coherence[static_cast<std::size_t>(by) * cols + bx]; }
  // Lookup for a pixel coordinate.
  double coherence_at_pixel(int x, int y) const {
    return coherence_at(x / block, y / block);
  }
};

// Stable failure codes (also emitted by the CLI and event log).
inline constexpr const char* kLowForeground = "LOW_FOREGROUND";
inline constexpr const char* kLowContrast = "LOW_CONTRAST";
inline constexpr const char* kLowCoherence = "LOW_COHERENCE";

struct QualityReport {
  double foreground_ratio = 0.0;
  double mean_contrast = 0.0;   // intensity std-dev over foreground
  double mean_coherence = 0.0;  // mean over foreground blocks
  bool accepted = false;        // true iff reasons is empty
  std::vector<std::string> reasons;
};

struct QualityConfig {
  int block = 16;
  double seg_var_threshold = 100.0;
  double min_foreground = 0.25;
  double min_contrast = 15.0;
  double min_coherence = 0.35;
};

// Gradient-based least-squares block orientation from Sobel gradients
// (edge replication at borders). theta is the ridge direction, orthogonal
// to the dominant gradient; coherence is the vector strength of the
// doubled angles. Zero-gradient blocks get theta 0, coherence 0.
OrientationField orientation_field(const GrayImage& img, int block);

// Subunit 1 capture gate: foreground ratio, contrast over foreground, and
// mean orientation coherence over foreground blocks, each checked against
// its threshold. Rejection is a report, never an error.
QualityReport assess(const GrayImage& img, const QualityConfig& cfg = {});

}  // namespace fpgate
