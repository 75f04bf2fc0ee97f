#pragma once

#include <cstdint>
#include <vector>

#include "fpgate/structure.hpp"
#include "fpgate/template.hpp"

namespace fpgate {

/// Rigid alignment candidate: rotate by dtheta about the probe set's
/// centroid, then translate by (dx, dy). dtheta is kept in (-pi, pi].
struct RigidTransform {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

std::vector<Minutia> apply_transform(const std::vector<Minutia>& pts,
                                     const RigidTransform& t);

struct GaConfig {
  int population = 64;
  int generations = 60;
  double crossover_rate = 0.9;
  double mutation_rate = 0.15;
  int elite = 2;
  std::uint64_t seed = 42;
  double pair_radius = 6.0;              // px
  double pair_angle = 0.5235987755982988;  // pi/6
  double max_shift = 24.0;               // |dx|,|dy| bound, px
  double max_rot = 0.35;                 // |dtheta| bound, rad
};

// Greedy one-to-one pairing after applying t to a: nearest pairs first,
// admitted when within pair radius, within the angular tolerance, and of
// the same kind. Score = pairs / max(|a|,|b|); empty-vs-empty scores 1,
// empty-vs-nonempty 0.
double pairing_score(const std::vector<Minutia>& a, const std::vector<Minutia>& b,
                     const RigidTransform& t, double radius, double angle);

struct GaResult {
  RigidTransform transform;
  double score = 0.0;
};

// Genetic search over RigidTransform with pairing_score fitness:
// tournament selection (size 3), blend crossover, Gaussian mutation
// (sigma 2 px / 2 deg), elitism. The identity transform is seeded into
// the initial population; the best individual ever seen is returned.
// Deterministic given cfg.seed.
GaResult ga_align(const std::vector<Minutia>& a, const std::vector<Minutia>& b,
                  const GaConfig& cfg);

// (1 + cosine)/2 similarity; two all-zero vectors score 1, exactly one
// all-zero scores 0. Throws ShapeMismatch.
double wavelet_similarity(const std::vector<double>& u, const std::vector<double>& v);
inline double wavelet_similarity(const WaveletFeature& u, const WaveletFeature& v) {
  return wavelet_similarity(u.vector, v.vector);
}

// 1 - ||p-q|| / sqrt(D) for D-dimensional [0,1] vectors.
double embed_similarity(const std::vector<double>& p, const std::vector<double>& q);

struct MatchConfig {
  GaConfig ga;
  double w_struct = 0.5;
  double w_wavelet = 0.35;
  double w_embed = 0.15;
  double threshold = 0.75;  // fallback; calibration overrides
};

struct MatchScore {
  double s_struct = 0.0;
  double s_wavelet = 0.0;
  double s_embed = 0.0;
  double fused = 0.0;
  RigidTransform transform;
  bool accepted = false;
};

// Weighted fusion of the three subunit scores. Weights are normalized by
// their sum, so equal component scores fuse to exactly that score.
// accepted iff fused >= threshold (ties accept).
MatchScore match(const Template& probe, const Template& stored,
                 const MatchConfig& cfg = {});

}  // namespace fpgate
