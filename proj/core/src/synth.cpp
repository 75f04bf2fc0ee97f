#include "fpgate/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fpgate/errors.hpp"
#include "fpgate/rng.hpp"

namespace fpgate {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kBackground = 160.0;
constexpr double kAmplitude = 85.0;

struct Wave {
  double u, v, phase, amp;
};

// Per-subject pattern parameters, drawn once from (seed, subject).
struct SubjectPattern {
  double core_x, core_y;      // primary singularity
  bool has_second;
  double second_x, second_y;  // optional second focus
  double second_weight;
  double wavelength;          // ridge spacing, fixed across impressions
  double tilt_c, tilt_s;      // ridge-flow ellipse axis (cos/sin of tilt)
  double ecc;                 // minor/major axis ratio
  std::vector<Wave> waves;    // low-frequency phase perturbation
  struct Cut {
    double x, y, r;
  };
  std::vector<Cut> cuts;      // ridge interruptions -> stable endings

  // Anisotropic distance: ridges follow ellipses with the subject's own
  // tilt and eccentricity, so two subjects' direction fields disagree
  // even when their cores are aligned.
  double flow_dist(double dx, double dy) const {
    double ax = tilt_c * dx + tilt_s * dy;
    double ay = -tilt_s * dx + tilt_c * dy;
    ay /= ecc;
    return std::sqrt(ax * ax + ay * ay);
  }
};

SubjectPattern make_pattern(const SynthSpec& spec, int subject) {
  Rng rng(mix_seed(spec.seed, 0x5bbb1eULL + static_cast<std::uint64_t>(subject)));
  SubjectPattern pat;
  double s = spec.size;

  pat.core_x = rng.uniform(0.38 * s, 0.62 * s);
  pat.core_y = rng.uniform(0.36 * s, 0.58 * s);

  pat.has_second = rng.uniform() < 0.5;
  pat.second_x = pat.core_x + rng.uniform(-0.18 * s, 0.18 * s);
  pat.second_y = pat.core_y + rng.uniform(0.12 * s, 0.28 * s);
  pat.second_weight = rng.uniform(0.35, 0.6);

  pat.wavelength = rng.uniform(6.5, 10.5);

  double tilt = rng.uniform(0.0, 3.14159265358979324);
  pat.tilt_c = std::cos(tilt);
  pat.tilt_s = std::sin(tilt);
  pat.ecc = rng.uniform(0.6, 0.95);

  for (int i = 0; i < 2; ++i) {
    Wave w;
    w.u = rng.uniform(-1.5, 1.5);
    w.v = rng.uniform(-1.5, 1.5);
    w.phase = rng.uniform(0.0, kTwoPi);
    w.amp = rng.uniform(1.2, 2.4);
    pat.waves.push_back(w);
  }

  // Ridge cuts in the mid-radius band around the core, spaced at least a
  // ridge period apart. The cut radius scales with the ridge wavelength
  // so a cut always reaches a ridge even when centered on a valley.
  int n_cuts = 14 + static_cast<int>(rng.below(4));
  int attempts = 0;
  while (static_cast<int>(pat.cuts.size()) < n_cuts && attempts < 200) {
    ++attempts;
    double ang = rng.uniform(0.0, kTwoPi);
    double rad = rng.uniform(0.08 * s, 0.30 * s);
    SubjectPattern::Cut c;
    c.x = pat.core_x + rad * std::cos(ang);
    c.y = pat.core_y + rad * std::sin(ang);
    c.r = rng.uniform(0.35, 0.5) * pat.wavelength;
    bool clear = true;
    for (const auto& other : pat.cuts) {
      double dx = c.x - other.x, dy = c.y - other.y;
      if (std::sqrt(dx * dx + dy * dy) < 1.2 * pat.wavelength) {
        clear = false;
        break;
      }
    }
    if (clear) pat.cuts.push_back(c);
  }
  return pat;
}

// Noise-free pattern intensity at base-frame coordinates.
double pattern_value(const SubjectPattern& pat, const SynthSpec& spec,
                     double x, double y) {
  double s = spec.size;

  // Elliptical print window. The edge is kept narrow so ridge ends sit
  // right at the segmentation boundary instead of smearing into it.
  double ex = (x - 0.5 * s) / (0.44 * s);
  double ey = (y - 0.5 * s) / (0.47 * s);
  double rho = std::sqrt(ex * ex + ey * ey);
  double window;
  if (rho >= 0.97) {
    window = 0.0;
  } else if (rho > 0.92) {
    window = 0.5 * (1.0 + std::cos((rho - 0.92) / 0.05 * 3.14159265358979324));
  } else {
    window = 1.0;
  }
  if (window == 0.0) return kBackground + kAmplitude;

  double phase = pat.flow_dist(x - pat.core_x, y - pat.core_y);
  if (pat.has_second)
    phase += pat.second_weight *
             pat.flow_dist(x - pat.second_x, y - pat.second_y);
  for (const Wave& w : pat.waves)
    phase += w.amp * std::sin(kTwoPi * (w.u * x + w.v * y) / s + w.phase);

  // Saturated profile: near-flat ridge tops with steep flanks, so pixel
  // noise cannot flip the binarization near the ridge/valley boundary.
  double carrier = std::cos(kTwoPi * phase / pat.wavelength);
  double ridge = std::tanh(2.5 * carrier) / std::tanh(2.5);

  // Cuts break the stripe locally, reading as valley (bright), never as
  // flat gray: flat regions under noise would binarize into speckle.
  double strength = 1.0;
  for (const auto& c : pat.cuts) {
    double dx = x - c.x, dy = y - c.y;
    double d = std::sqrt(dx * dx + dy * dy);
    if (d < c.r) strength = 0.0;
    else if (d < c.r + 2.0) strength = std::min(strength, (d - c.r) / 2.0);
  }
  double suppression = window * strength;
  double effective = suppression * ridge - (1.0 - suppression);

  return kBackground - kAmplitude * effective;
}

}  // namespace

GrayImage synth_fingerprint(const SynthSpec& spec, int subject, int impression) {
  if (subject < 0 || subject >= spec.subjects || impression < 0 ||
      impression >= spec.impressions)
    throw BadDimensions("subject/impression outside spec");
  if (spec.size < 64) throw BadDimensions("synth size must be >= 64");

  SubjectPattern pat = make_pattern(spec, subject);

  Rng rng(mix_seed(spec.seed, 0xca97a6eULL + static_cast<std::uint64_t>(subject),
                   0x10000ULL + static_cast<std::uint64_t>(impression)));
  double rot = rng.uniform(-spec.max_rot, spec.max_rot);
  double shift_x = rng.uniform(-spec.max_shift, spec.max_shift);
  double shift_y = rng.uniform(-spec.max_shift, spec.max_shift);

  double half = 0.5 * spec.size;
  double c = std::cos(-rot), s = std::sin(-rot);

  GrayImage img(spec.size, spec.size);
  for (int y = 0; y < spec.size; ++y) {
    for (int x = 0; x < spec.size; ++x) {
      // Inverse map into the base frame: undo shift, then rotation
      // about the image center.
      double px = x - half - shift_x;
      double py = y - half - shift_y;
      double bx = c * px - s * py + half;
      double by = s * px + c * py + half;
      double v = pattern_value(pat, spec, bx, by);
      if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
      img.at(x, y) =
          static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

std::string synth_name(int subject, int impression) {
  return "s" + std::to_string(subject) + "_i" + std::to_string(impression) +
         ".pgm";
}

}  // namespace fpgate
