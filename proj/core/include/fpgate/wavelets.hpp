#pragma once

#include <vector>

#include "fpgate/grid.hpp"
#include "fpgate/mlp.hpp"
#include "fpgate/surface.hpp"

namespace fpgate {

/// One decomposition level: the three detail subbands.
struct SubbandLevel {
  Grid lh;  // (a+b-c-d)/2
  Grid hl;  // (a-b+c-d)/2
  Grid hh;  // (a-b-c+d)/2
};

/// Orthonormal Haar pyramid. The input is padded to the next multiple of
/// 2^levels by edge replication; orig_* keep the pre-pad dimensions so
/// idwt2 can crop back. Coefficient energy equals padded-input energy.
struct SubbandPyramid {
  int levels = 0;
  int orig_width = 0;
  int orig_height = 0;
  std::vector<SubbandLevel> detail;  // detail[0] is level 1 (finest)
  Grid ll;                           // final approximation

  // Subband count as used by subband_stats: 3*levels + 1.
  int subband_count() const { return 3 * levels + 1; }
};

// Separable orthonormal Haar analysis: per 2x2 block [a b; c d],
// LL=(a+b+c+d)/2, LH=(a+b-c-d)/2, HL=(a-b+c-d)/2, HH=(a-b-c+d)/2,
// recursed on LL.
SubbandPyramid dwt2(const Grid& field, int levels);

// Exact inverse of dwt2 up to floating round-off; padding removed.
Grid idwt2(const SubbandPyramid& pyr);

// Per subband (LH,HL,HH per level, then the final LL):
// [normalized energy share, Shannon entropy (bits) of the 16-bin
// coefficient-magnitude histogram]. Energy shares sum to 1 (all zero for
// an all-zero pyramid). Vector length = 2 * (3*levels + 1).
std::vector<double> subband_stats(const SubbandPyramid& pyr);

/// Unit-normalized wavelet feature vector with the indices the MLP kept.
struct WaveletFeature {
  std::vector<double> vector;
  std::vector<int> selected;

  bool operator==(const WaveletFeature&) const = default;
};

// Scores every statistic with the selector net (input = the statistic
// value followed by its subband one-hot), keeps the k best (ties to the
// lower index), zeroes the rest and L2-normalizes. An all-zero surface
// yields the all-zero vector.
WaveletFeature wavelet_feature(const WeightedSurface& surface, const Mlp& net,
                               int levels, int k);

// Selection helper, exposed for property tests: indices of the k highest
// scores, ties broken by lower index, returned sorted ascending.
std::vector<int> select_top_k(const std::vector<double>& scores, int k);

}  // namespace fpgate
