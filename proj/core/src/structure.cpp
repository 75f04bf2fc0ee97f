#include "fpgate/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace fpgate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

// 8-neighborhood in the Zhang-Suen cycle order P2..P9 (N, NE, E, SE, S,
// SW, W, NW).
constexpr int kNbx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNby[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int crossing_number(const BitGrid& g, int x, int y) {
  int cn = 0;
  for (int i = 0; i < 8; ++i) {
    int a = g.get(x + kNbx[i], y + kNby[i]);
    int b = g.get(x + kNbx[(i + 1) % 8], y + kNby[(i + 1) % 8]);
    cn += std::abs(a - b);
  }
  return cn / 2;
}

int neighbor_count(const BitGrid& g, int x, int y) {
  int n = 0;
  for (int i = 0; i < 8; ++i) n += g.get(x + kNbx[i], y + kNby[i]);
  return n;
}

double wrap_pi(double a) {
  while (a > kPi) a -= kTwoPi;
  while (a <= -kPi) a += kTwoPi;
  return a;
}

}  // namespace

BitGrid binarize(const GrayImage& img, const ForegroundMask& mask, int block) {
  BitGrid out(img.width, img.height);
  int cols = (img.width + block - 1) / block;
  int rows = (img.height + block - 1) / block;
  for (int by = 0; by < rows; ++by) {
    for (int bx = 0; bx < cols; ++bx) {
      int x1 = std::min((bx + 1) * block, img.width);
      int y1 = std::min((by + 1) * block, img.height);
      double sum = 0.0;
      int n = 0;
      for (int y = by * block; y < y1; ++y)
        for (int x = bx * block; x < x1; ++x) {
          sum += img.at(x, y);
          ++n;
        }
      double mean = sum / n;
      for (int y = by * block; y < y1; ++y)
        for (int x = bx * block; x < x1; ++x)
          if (mask.at(x, y) && img.at(x, y) < mean) out.at(x, y) = 1;
    }
  }
  return out;
}

BitGrid thin(const BitGrid& bin) {
  BitGrid g = bin;
  std::vector<std::pair<int, int>> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
          if (!g.at(x, y)) continue;
          int b = neighbor_count(g, x, y);
          if (b < 2 || b > 6) continue;
          // A(P): 0->1 transitions around the cycle.
          int a = 0;
          for (int i = 0; i < 8; ++i) {
            int p = g.get(x + kNbx[i], y + kNby[i]);
            int q = g.get(x + kNbx[(i + 1) % 8], y + kNby[(i + 1) % 8]);
            if (p == 0 && q == 1) ++a;
          }
          if (a != 1) continue;
          int p2 = g.get(x, y - 1), p4 = g.get(x + 1, y), p6 = g.get(x, y + 1),
              p8 = g.get(x - 1, y);
          if (pass == 0) {
            if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
          } else {
            if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
          }
          doomed.emplace_back(x, y);
        }
      }
      for (auto [x, y] : doomed) g.at(x, y) = 0;
      if (!doomed.empty()) changed = true;
    }
  }
  return g;
}

namespace {

// Walk along the skeleton from `from` into `into` for up to max_steps,
// stopping at dead ends and junctions. Returns the final position.
std::pair<int, int> trace_arm(const BitGrid& g, int from_x, int from_y,
                              int into_x, int into_y, int max_steps) {
  int px = from_x, py = from_y;
  int cx = into_x, cy = into_y;
  for (int step = 1; step < max_steps; ++step) {
    int nx = -1, ny = -1, options = 0;
    for (int i = 0; i < 8; ++i) {
      int qx = cx + kNbx[i], qy = cy + kNby[i];
      if (!g.get(qx, qy)) continue;
      if (qx == px && qy == py) continue;
      if (qx == from_x && qy == from_y) continue;
      ++options;
      if (nx < 0) {
        nx = qx;
        ny = qy;
      }
    }
    if (options != 1) break;
    px = cx;
    py = cy;
    cx = nx;
    cy = ny;
  }
  return {cx, cy};
}

double direction_angle(int from_x, int from_y, int to_x, int to_y) {
  double a = std::atan2(static_cast<double>(to_y - from_y),
                        static_cast<double>(to_x - from_x));
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

std::vector<Minutia> extract_minutiae(const BitGrid& skeleton, int border) {
  std::vector<Minutia> out;
  for (int y = 0; y < skeleton.height; ++y) {
    for (int x = 0; x < skeleton.width; ++x) {
      if (!skeleton.at(x, y)) continue;
      if (x < border || y < border || x >= skeleton.width - border ||
          y >= skeleton.height - border)
        continue;
      int cn = crossing_number(skeleton, x, y);
      if (cn != 1 && cn != 3) continue;

      // Arm directions from 5 px traces. An ending has one arm; for a
      // bifurcation take the stem: the arm angularly farthest from the
      // other two, which is stable under rotation (the first arm in
      // cycle order is not).
      std::vector<double> arms;
      for (int i = 0; i < 8; ++i) {
        int qx = x + kNbx[i], qy = y + kNby[i];
        if (!skeleton.get(qx, qy)) continue;
        auto [ex, ey] = trace_arm(skeleton, x, y, qx, qy, 5);
        if (ex == x && ey == y) continue;
        arms.push_back(direction_angle(x, y, ex, ey));
      }
      double theta = 0.0;
      if (arms.size() == 1) {
        theta = arms[0];
      } else if (arms.size() > 1) {
        double best_sep = -1.0;
        for (std::size_t i = 0; i < arms.size(); ++i) {
          double sep = kTwoPi;
          for (std::size_t j = 0; j < arms.size(); ++j) {
            if (i == j) continue;
            sep = std::min(sep, std::abs(wrap_pi(arms[i] - arms[j])));
          }
          if (sep > best_sep) {
            best_sep = sep;
            theta = arms[i];
          }
        }
      }

      Minutia m;
      m.x = x;
      m.y = y;
      m.theta = theta;
      m.kind = cn == 1 ? MinutiaKind::ENDING : MinutiaKind::BIFURCATION;
      out.push_back(m);
    }
  }
  return out;
}

std::pair<int, int> ridge_shape_stats(const BitGrid& skeleton,
                                      double curvature_threshold) {
  BitGrid seen(skeleton.width, skeleton.height);
  int curves = 0, lines = 0;

  for (int y0 = 0; y0 < skeleton.height; ++y0) {
    for (int x0 = 0; x0 < skeleton.width; ++x0) {
      if (!skeleton.at(x0, y0) || seen.at(x0, y0)) continue;

      // Collect the component.
      std::vector<std::pair<int, int>> comp;
      std::deque<std::pair<int, int>> queue{{x0, y0}};
      seen.at(x0, y0) = 1;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        comp.emplace_back(cx, cy);
        for (int i = 0; i < 8; ++i) {
          int qx = cx + kNbx[i], qy = cy + kNby[i];
          if (qx < 0 || qy < 0 || qx >= skeleton.width || qy >= skeleton.height)
            continue;
          if (!skeleton.at(qx, qy) || seen.at(qx, qy)) continue;
          seen.at(qx, qy) = 1;
          queue.emplace_back(qx, qy);
        }
      }

      // Walk from an endpoint if one exists (scan order picks the first),
      // otherwise from the first pixel (closed curve).
      std::pair<int, int> start = comp.front();
      std::sort(comp.begin(), comp.end(),
                [](auto a, auto b) { return a.second != b.second ? a.second < b.second : a.first < b.first; });
      bool found_end = false;
      for (auto [cx, cy] : comp) {
        if (crossing_number(skeleton, cx, cy) == 1) {
          start = {cx, cy};
          found_end = true;
          break;
        }
      }
      if (!found_end) start = comp.front();

      BitGrid walked(skeleton.width, skeleton.height);
      std::vector<std::pair<int, int>> path{start};
      walked.at(start.first, start.second) = 1;
      for (;;) {
        auto [cx, cy] = path.back();
        int nx = -1, ny = -1;
        for (int i = 0; i < 8; ++i) {
          int qx = cx + kNbx[i], qy = cy + kNby[i];
          if (qx < 0 || qy < 0 || qx >= skeleton.width || qy >= skeleton.height)
            continue;
          if (!skeleton.at(qx, qy) || walked.at(qx, qy)) continue;
          nx = qx;
          ny = qy;
          break;
        }
        if (nx < 0) break;
        walked.at(nx, ny) = 1;
        path.emplace_back(nx, ny);
      }

      double turn_sum = 0.0;
      int turn_n = 0;
      for (std::size_t i = 2; i < path.size(); ++i) {
        double a1 = std::atan2(static_cast<double>(path[i - 1].second - path[i - 2].second),
                               static_cast<double>(path[i - 1].first - path[i - 2].first));
        double a2 = std::atan2(static_cast<double>(path[i].second - path[i - 1].second),
                               static_cast<double>(path[i].first - path[i - 1].first));
        turn_sum += std::abs(wrap_pi(a2 - a1));
        ++turn_n;
      }
      double mean_turn = turn_n > 0 ? turn_sum / turn_n : 0.0;
      if (mean_turn > curvature_threshold)
        ++curves;
      else
        ++lines;
    }
  }
  return {curves, lines};
}

StructuralFeature structural_feature(const GrayImage& img,
                                     const ForegroundMask& mask,
                                     const StructureConfig& cfg) {
  StructuralFeature feat;

  BitGrid skel = thin(binarize(img, mask, cfg.block));
  std::vector<Minutia> raw = extract_minutiae(skel, cfg.border);

  // Additionally drop minutiae near the segmentation boundary: any
  // non-mask pixel within Chebyshev distance `border` disqualifies.
  for (const Minutia& m : raw) {
    bool clear = true;
    for (int dy = -cfg.border; clear && dy <= cfg.border; ++dy)
      for (int dx = -cfg.border; dx <= cfg.border; ++dx) {
        int x = m.x + dx, y = m.y + dy;
        if (x < 0 || y < 0 || x >= mask.width || y >= mask.height || !mask.at(x, y)) {
          clear = false;
          break;
        }
      }
    if (clear) feat.minutiae.push_back(m);
  }

  auto [curves, lines] = ridge_shape_stats(skel, cfg.curvature_threshold);
  feat.n_curves = curves;
  feat.n_lines = lines;

  int endings = 0, bifurcations = 0;
  for (const auto& m : feat.minutiae)
    (m.kind == MinutiaKind::ENDING ? endings : bifurcations) += 1;

  double mean_nn = 0.0;
  if (feat.minutiae.size() >= 2) {
    double sum = 0.0;
    for (std::size_t i = 0; i < feat.minutiae.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < feat.minutiae.size(); ++j) {
        if (i == j) continue;
        double dx = feat.minutiae[i].x - feat.minutiae[j].x;
        double dy = feat.minutiae[i].y - feat.minutiae[j].y;
        best = std::min(best, std::sqrt(dx * dx + dy * dy));
      }
      sum += best;
    }
    mean_nn = sum / static_cast<double>(feat.minutiae.size());
  }

  auto scaled = [](double v, double cap) { return std::clamp(v / cap, 0.0, 1.0); };
  feat.embed = {scaled(curves, cfg.count_cap), scaled(lines, cfg.count_cap),
                scaled(endings, cfg.count_cap), scaled(bifurcations, cfg.count_cap),
                scaled(mean_nn, cfg.dist_cap)};
  return feat;
}

}  // namespace fpgate
