#include "fpgate/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpgate/errors.hpp"

namespace fpgate {

namespace {

// Edge-replicate pad to multiples of 2^levels.
Grid pad_to_multiple(const Grid& g, int multiple) {
  int pw = ((g.width + multiple - 1) / multiple) * multiple;
  int ph = ((g.height + multiple - 1) / multiple) * multiple;
  if (pw == g.width && ph == g.height) return g;
  Grid out(pw, ph);
  for (int y = 0; y < ph; ++y) {
    int sy = std::min(y, g.height - 1);
    for (int x = 0; x < pw; ++x)
      out.at(x, y) = g.at(std::min(x, g.width - 1), sy);
  }
  return out;
}

}  // namespace

SubbandPyramid dwt2(const Grid& field, int levels) {
  if (levels < 1) throw ShapeMismatch("dwt2 needs levels >= 1");
  if (field.width < 1 || field.height < 1) throw ShapeMismatch("dwt2 on empty grid");

  SubbandPyramid pyr;
  pyr.levels = levels;
  pyr.orig_width = field.width;
  pyr.orig_height = field.height;

  Grid ll = pad_to_multiple(field, 1 << levels);
  for (int lev = 0; lev < levels; ++lev) {
    int hw = ll.width / 2, hh = ll.height / 2;
    SubbandLevel sl{Grid(hw, hh), Grid(hw, hh), Grid(hw, hh)};
    Grid next(hw, hh);
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < hw; ++x) {
        double a = ll.at(2 * x, 2 * y);
        double b = ll.at(2 * x + 1, 2 * y);
        double c = ll.at(2 * x, 2 * y + 1);
        double d = ll.at(2 * x + 1, 2 * y + 1);
        next.at(x, y) = (a + b + c + d) / 2.0;
        sl.lh.at(x, y) = (a + b - c - d) / 2.0;
        sl.hl.at(x, y) = (a - b + c - d) / 2.0;
        sl.hh.at(x, y) = (a - b - c + d) / 2.0;
      }
    }
    pyr.detail.push_back(std::move(sl));
    ll = std::move(next);
  }
  pyr.ll = std::move(ll);
  return pyr;
}

Grid idwt2(const SubbandPyramid& pyr) {
  Grid ll = pyr.ll;
  for (int lev = pyr.levels; lev-- > 0;) {
    const SubbandLevel& sl = pyr.detail[static_cast<std::size_t>(lev)];
    Grid up(ll.width * 2, ll.height * 2);
    for (int y = 0; y < ll.height; ++y) {
      for (int x = 0; x < ll.width; ++x) {
        double s = ll.at(x, y);
        double lh = sl.lh.at(x, y);
        double hl = sl.hl.at(x, y);
        double hh = sl.hh.at(x, y);
        up.at(2 * x, 2 * y) = (s + lh + hl + hh) / 2.0;
        up.at(2 * x + 1, 2 * y) = (s + lh - hl - hh) / 2.0;
        up.at(2 * x, 2 * y + 1) = (s - lh + hl - hh) / 2.0;
        up.at(2 * x + 1, 2 * y + 1) = (s - lh - hl + hh) / 2.0;
      }
    }
    ll = std::move(up);
  }

  if (ll.width == pyr.orig_width && ll.height == pyr.orig_height) return ll;
  Grid out(pyr.orig_width, pyr.orig_height);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.at(x, y) = ll.at(x, y);
  return out;
}

namespace {

double grid_energy(const Grid& g) {
  double e = 0.0;
  for (double v : g.v) e += v * v;
  return e;
}

// Shannon entropy (bits) of the 16-bin magnitude histogram.
double magnitude_entropy(const Grid& g) {
  if (g.v.empty()) return 0.0;
  double maxmag = 0.0;
  for (double v : g.v) maxmag = std::max(maxmag, std::abs(v));
  constexpr int kBins = 16;
  int counts[kBins] = {};
  if (maxmag == 0.0) {
    counts[0] = static_cast<int>(g.v.size());
  } else {
    for (double v : g.v) {
      int bin = static_cast<int>(std::abs(v) / maxmag * kBins);
      if (bin >= kBins) bin = kBins - 1;
      ++counts[bin];
    }
  }
  double n = static_cast<double>(g.v.size());
  double h = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

std::vector<double> subband_stats(const SubbandPyramid& pyr) {
  std::vector<const Grid*> bands;
  for (const auto& sl : pyr.detail) {
    bands.push_back(&sl.lh);
    bands.push_back(&sl.hl);
    bands.push_back(&sl.hh);
  }
  bands.push_back(&pyr.ll);

  std::vector<double> energies(bands.size());
  double total = 0.0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    energies[i] = grid_energy(*bands[i]);
    total += energies[i];
  }

  std::vector<double> stats;
  stats.reserve(2 * bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    stats.push_back(total > 0.0 ? energies[i] / total : 0.0);
    stats.push_back(magnitude_entropy(*bands[i]));
  }
  return stats;
}

std::vector<int> select_top_k(const std::vector<double>& scores, int k) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  if (k < static_cast<int>(idx.size())) idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

WaveletFeature wavelet_feature(const WeightedSurface& surface, const Mlp& net,
                               int levels, int k) {
  Grid field(surface.width, surface.height);
  field.v = surface.z;

  SubbandPyramid pyr = dwt2(field, levels);
  std::vector<double> stats = subband_stats(pyr);

  int subbands = pyr.subband_count();
  if (net.input_size() != 1 + subbands)
    throw ShapeMismatch("selector net input " + std::to_string(net.input_size()) +
                        " != 1 + " + std::to_string(subbands));
  if (k > static_cast<int>(stats.size()))
    throw ShapeMismatch("k exceeds statistic count");

  std::vector<double> scores(stats.size());
  std::vector<double> in(static_cast<std::size_t>(1 + subbands), 0.0);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    std::fill(in.begin(), in.end(), 0.0);
    in[0] = stats[i];
    in[1 + i / 2] = 1.0;  // subband one-hot
    scores[i] = mlp_forward(net, in)[0];
  }

  WaveletFeature feat;
  feat.selected = select_top_k(scores, k);
  feat.vector.assign(stats.size(), 0.0);
  for (int i : feat.selected)
    feat.vector[static_cast<std::size_t>(i)] = stats[static_cast<std::size_t>(i)];

  double norm2 = 0.0;
  for (double v : feat.vector) norm2 += v * v;
  if (norm2 > 0.0) {
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : feat.vector) v *= inv;
  }
  return feat;
}

}  // namespace fpgate
