#pragma once

#include <cstdint>

#include "fpgate/image.hpp"

namespace fpgate {

/// Synthetic gallery layout: `subjects` fingers, `impressions` captures
/// each. All geometry/noise below is sampled from (seed, subject[,
/// impression]) streams, so the whole tree is reproducible byte for byte.
struct SynthSpec {
  int subjects = 20;
  int impressions = 5;
  std::uint64_t seed = 42;
  int size = 128;            // square images
  double noise_sigma = 2.0;  // additive per-pixel noise, intensity units
  double max_shift = 6.0;    // px
  double max_rot = 0.12;     // radians
};

// Renders one capture: the subject's ridge pattern (1-2 planted
// singularities, fixed ridge wavelength, planted ridge cuts so minutiae
// are stable across impressions) under an impression-seeded rotation,
// shift and additive noise. The default spec's output passes the quality
// gate and yields >= 8 minutiae.
GrayImage synth_fingerprint(const SynthSpec& spec, int subject, int impression);

// Canonical file name inside a synth tree: s<subject>_i<impression>.pgm
std::string synth_name(int subject, int impression);

}  // namespace fpgate
