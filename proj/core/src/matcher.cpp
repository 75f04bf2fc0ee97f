#include "fpgate/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "fpgate/errors.hpp"
#include "fpgate/rng.hpp"

namespace fpgate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_pi(double a) {
  while (a > kPi) a -= kTwoPi;
  while (a <= -kPi) a += kTwoPi;
  return a;
}

double wrap_2pi(double a) {
  while (a >= kTwoPi) a -= kTwoPi;
  while (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

std::vector<Minutia> apply_transform(const std::vector<Minutia>& pts,
                                     const RigidTransform& t) {
  double cx = 0.0, cy = 0.0;
  for (const auto& m : pts) {
    cx += m.x;
    cy += m.y;
  }
  if (!pts.empty()) {
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
  }
  double c = std::cos(t.dtheta), s = std::sin(t.dtheta);

  std::vector<Minutia> out;
  out.reserve(pts.size());
  for (const auto& m : pts) {
    double rx = m.x - cx, ry = m.y - cy;
    Minutia n = m;
    n.x = static_cast<int>(std::lround(cx + c * rx - s * ry + t.dx));
    n.y = static_cast<int>(std::lround(cy + s * rx + c * ry + t.dy));
    n.theta = wrap_2pi(m.theta + t.dtheta);
    out.push_back(n);
  }
  return out;
}

namespace {

// Greedy one-to-one correspondences under t; shared by the score and the
// least-squares polish. Pairing works on continuous positions, without
// the integer rounding of apply_transform.
std::vector<std::pair<int, int>> pair_minutiae(const std::vector<Minutia>& a,
                                               const std::vector<Minutia>& b,
                                               const RigidTransform& t,
                                               double radius, double angle) {
  std::vector<std::pair<int, int>> out;
  if (a.empty() || b.empty()) return out;

  double cx = 0.0, cy = 0.0;
  for (const auto& m : a) {
    cx += m.x;
    cy += m.y;
  }
  cx /= static_cast<double>(a.size());
  cy /= static_cast<double>(a.size());
  double c = std::cos(t.dtheta), s = std::sin(t.dtheta);

  struct Cand {
    double dist;
    int i, j;
  };
  std::vector<Cand> cands;
  double r2 = radius * radius;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double rx = a[i].x - cx, ry = a[i].y - cy;
    double ax = cx + c * rx - s * ry + t.dx;
    double ay = cy + s * rx + c * ry + t.dy;
    double atheta = a[i].theta + t.dtheta;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].kind != b[j].kind) continue;
      double dx = ax - b[j].x, dy = ay - b[j].y;
      double d2 = dx * dx + dy * dy;
      if (d2 > r2) continue;
      if (std::abs(wrap_pi(atheta - b[j].theta)) > angle) continue;
      cands.push_back({d2, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });

  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  for (const Cand& cd : cands) {
    if (used_a[static_cast<std::size_t>(cd.i)] || used_b[static_cast<std::size_t>(cd.j)]) continue;
    used_a[static_cast<std::size_t>(cd.i)] = 1;
    used_b[static_cast<std::size_t>(cd.j)] = 1;
    out.emplace_back(cd.i, cd.j);
  }
  return out;
}

}  // namespace

double pairing_score(const std::vector<Minutia>& a, const std::vector<Minutia>& b,
                     const RigidTransform& t, double radius, double angle) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  auto pairs = pair_minutiae(a, b, t, radius, angle);
  return static_cast<double>(pairs.size()) /
         static_cast<double>(std::max(a.size(), b.size()));
}

GaResult ga_align(const std::vector<Minutia>& a, const std::vector<Minutia>& b,
                  const GaConfig& cfg) {
  Rng rng(cfg.seed);
  const int pop_n = cfg.population;
  constexpr double kMutSigmaShift = 2.0;             // px
  const double kMutSigmaRot = 2.0 * kPi / 180.0;     // 2 degrees

  auto clamp_t = [&](RigidTransform& t) {
    t.dx = std::clamp(t.dx, -cfg.max_shift, cfg.max_shift);
    t.dy = std::clamp(t.dy, -cfg.max_shift, cfg.max_shift);
    t.dtheta = std::clamp(wrap_pi(t.dtheta), -cfg.max_rot, cfg.max_rot);
  };

  std::vector<RigidTransform> pop(static_cast<std::size_t>(pop_n));
  // Identity first: verification probes are near-registered by capture,
  // and a=a self match must hit the optimum.
  pop[0] = RigidTransform{};
  for (int i = 1; i < pop_n; ++i) {
    pop[static_cast<std::size_t>(i)] = {rng.uniform(-cfg.max_shift, cfg.max_shift),
                                        rng.uniform(-cfg.max_shift, cfg.max_shift),
                                        rng.uniform(-cfg.max_rot, cfg.max_rot)};
  }

  auto fitness = [&](const RigidTransform& t) {
    return pairing_score(a, b, t, cfg.pair_radius, cfg.pair_angle);
  };

  std::vector<double> fit(static_cast<std::size_t>(pop_n));
  for (int i = 0; i < pop_n; ++i) fit[static_cast<std::size_t>(i)] = fitness(pop[static_cast<std::size_t>(i)]);

  GaResult best;
  auto update_best = [&](const RigidTransform& t, double f) {
    if (f > best.score) {
      best.score = f;
      best.transform = t;
    }
  };
  for (int i = 0; i < pop_n; ++i) update_best(pop[static_cast<std::size_t>(i)], fit[static_cast<std::size_t>(i)]);

  auto tournament = [&]() -> int {
    int winner = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_n)));
    for (int k = 1; k < 3; ++k) {
      int ch = static_cast<int>(rng.below(static_cast<std::uint64_t>(pop_n)));
      if (fit[static_cast<std::size_t>(ch)] > fit[static_cast<std::size_t>(winner)]) winner = ch;
    }
    return winner;
  };

  std::vector<int> order(static_cast<std::size_t>(pop_n));
  for (int gen = 0; gen < cfg.generations; ++gen) {
    // Rank for elitism (stable: ties keep lower index).
    for (int i = 0; i < pop_n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return fit[static_cast<std::size_t>(x)] > fit[static_cast<std::size_t>(y)];
    });

    std::vector<RigidTransform> next;
    next.reserve(static_cast<std::size_t>(pop_n));
    for (int e = 0; e < cfg.elite && e < pop_n; ++e)
      next.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

    while (static_cast<int>(next.size()) < pop_n) {
      const RigidTransform& p1 = pop[static_cast<std::size_t>(tournament())];
      const RigidTransform& p2 = pop[static_cast<std::size_t>(tournament())];
      RigidTransform child = p1;
      if (rng.uniform() < cfg.crossover_rate) {
        double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        child.dx = u1 * p1.dx + (1.0 - u1) * p2.dx;
        child.dy = u2 * p1.dy + (1.0 - u2) * p2.dy;
        child.dtheta = u3 * p1.dtheta + (1.0 - u3) * p2.dtheta;
      }
      if (rng.uniform() < cfg.mutation_rate) child.dx += rng.normal(0.0, kMutSigmaShift);
      if (rng.uniform() < cfg.mutation_rate) child.dy += rng.normal(0.0, kMutSigmaShift);
      if (rng.uniform() < cfg.mutation_rate) child.dtheta += rng.normal(0.0, kMutSigmaRot);
      clamp_t(child);
      next.push_back(child);
    }

    pop = std::move(next);
    for (int i = 0; i < pop_n; ++i) {
      fit[static_cast<std::size_t>(i)] = fitness(pop[static_cast<std::size_t>(i)]);
      update_best(pop[static_cast<std::size_t>(i)], fit[static_cast<std::size_t>(i)]);
    }
  }

  // Least-squares polish: pairing_score is flat anywhere within the pair
  // radius, so the GA settles on a plateau. Refit the rigid transform to
  // the current correspondences (closed form) and keep it unless the
  // pairing degrades. Two rounds settle the correspondences.
  if (!a.empty() && !b.empty()) {
    double mu_x = 0.0, mu_y = 0.0;
    for (const auto& m : a) {
      mu_x += m.x;
      mu_y += m.y;
    }
    mu_x /= static_cast<double>(a.size());
    mu_y /= static_cast<double>(a.size());

    for (int round = 0; round < 2; ++round) {
      auto pairs = pair_minutiae(a, b, best.transform, cfg.pair_radius, cfg.pair_angle);
      if (pairs.size() < 2) break;

      double ex = 0.0, ey = 0.0, dx = 0.0, dy = 0.0;
      for (auto [i, j] : pairs) {
        ex += a[static_cast<std::size_t>(i)].x - mu_x;
        ey += a[static_cast<std::size_t>(i)].y - mu_y;
        dx += b[static_cast<std::size_t>(j)].x;
        dy += b[static_cast<std::size_t>(j)].y;
      }
      double n = static_cast<double>(pairs.size());
      ex /= n;
      ey /= n;
      dx /= n;
      dy /= n;

      double sc = 0.0, ss = 0.0;
      for (auto [i, j] : pairs) {
        double px = a[static_cast<std::size_t>(i)].x - mu_x - ex;
        double py = a[static_cast<std::size_t>(i)].y - mu_y - ey;
        double qx = b[static_cast<std::size_t>(j)].x - dx;
        double qy = b[static_cast<std::size_t>(j)].y - dy;
        sc += px * qx + py * qy;
        ss += px * qy - py * qx;
      }
      if (sc == 0.0 && ss == 0.0) break;

      RigidTransform fitted;
      fitted.dtheta = std::atan2(ss, sc);
      double rc = std::cos(fitted.dtheta), rs = std::sin(fitted.dtheta);
      fitted.dx = dx - (rc * ex - rs * ey) - mu_x;
      fitted.dy = dy - (rs * ex + rc * ey) - mu_y;
      fitted.dx = std::clamp(fitted.dx, -cfg.max_shift, cfg.max_shift);
      fitted.dy = std::clamp(fitted.dy, -cfg.max_shift, cfg.max_shift);
      fitted.dtheta = std::clamp(wrap_pi(fitted.dtheta), -cfg.max_rot, cfg.max_rot);

      double f = fitness(fitted);
      if (f < best.score) break;
      best.score = f;
      best.transform = fitted;
    }
  }
  return best;
}

double wavelet_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw ShapeMismatch("wavelet feature lengths differ");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 && vv == 0.0) return 1.0;
  if (uu == 0.0 || vv == 0.0) return 0.0;
  // sqrt(uu*vv) keeps identical inputs at cosine exactly 1.
  double cosine = std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
  return (1.0 + cosine) / 2.0;
}

double embed_similarity(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ShapeMismatch("embed vector lengths differ");
  if (p.empty()) throw ShapeMismatch("embed vectors are empty");
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p[i] - q[i];
    d2 += d * d;
  }
  return 1.0 - std::sqrt(d2) / std::sqrt(static_cast<double>(p.size()));
}

MatchScore match(const Template& probe, const Template& stored,
                 const MatchConfig& cfg) {
  MatchScore ms;
  GaResult ga = ga_align(probe.structural.minutiae, stored.structural.minutiae, cfg.ga);
  ms.s_struct = ga.score;
  ms.transform = ga.transform;
  ms.s_wavelet = wavelet_similarity(probe.wavelet, stored.wavelet);
  ms.s_embed = embed_similarity(probe.structural.embed, stored.structural.embed);

  double wsum = cfg.w_struct + cfg.w_wavelet + cfg.w_embed;
  ms.fused = (cfg.w_struct * ms.s_struct + cfg.w_wavelet * ms.s_wavelet +
              cfg.w_embed * ms.s_embed) /
             wsum;
  ms.accepted = ms.fused >= cfg.threshold;
  return ms;
}

}  // namespace fpgate
