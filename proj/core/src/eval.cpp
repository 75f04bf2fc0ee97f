#include "fpgate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "fpgate/errors.hpp"
#include "fpgate/rng.hpp"

namespace fpgate {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

EvalReport build_report(std::vector<double> genuine_scores,
                        std::vector<double> impostor_scores, int sweep,
                        double target_far) {
  if (sweep < 2) throw InsufficientData("sweep needs at least 2 points");

  EvalReport rep;
  rep.genuine_scores = std::move(genuine_scores);
  rep.impostor_scores = std::move(impostor_scores);
  rep.target_far = target_far;

  rep.thresholds.resize(static_cast<std::size_t>(sweep));
  rep.far.resize(static_cast<std::size_t>(sweep));
  rep.frr.resize(static_cast<std::size_t>(sweep));

  double ng = static_cast<double>(rep.genuine_scores.size());
  double ni = static_cast<double>(rep.impostor_scores.size());
  for (int i = 0; i < sweep; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(sweep - 1);
    rep.thresholds[static_cast<std::size_t>(i)] = t;
    std::size_t fa = 0, fr = 0;
    for (double s : rep.impostor_scores) fa += (s >= t);
    for (double s : rep.genuine_scores) fr += (s < t);
    rep.far[static_cast<std::size_t>(i)] = ni > 0 ? fa / ni : 0.0;
    rep.frr[static_cast<std::size_t>(i)] = ng > 0 ? fr / ng : 0.0;
  }

  // EER: the sweep point with the smallest |FAR-FRR|, refined on the
  // adjacent segment where the difference changes sign.
  std::size_t best = 0;
  double best_gap = std::abs(rep.far[0] - rep.frr[0]);
  for (std::size_t i = 1; i < rep.far.size(); ++i) {
    double gap = std::abs(rep.far[i] - rep.frr[i]);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  double diff_best = rep.far[best] - rep.frr[best];
  if (diff_best == 0.0) {
    rep.eer = rep.far[best];
  } else {
    rep.eer = (rep.far[best] + rep.frr[best]) / 2.0;
    for (std::size_t j : {best + 1, best - 1}) {
      if (j >= rep.far.size()) continue;  // wraps for best==0 too
      double diff_j = rep.far[j] - rep.frr[j];
      if ((diff_best > 0.0) == (diff_j > 0.0)) continue;
      double dfar = rep.far[j] - rep.far[best];
      double dfrr = rep.frr[j] - rep.frr[best];
      double denom = dfar - dfrr;
      if (denom == 0.0) continue;
      double u = (rep.frr[best] - rep.far[best]) / denom;
      u = std::clamp(u, 0.0, 1.0);
      rep.eer = rep.far[best] + dfar * u;
      break;
    }
  }

  Calibration cal = calibrate(rep, target_far);
  rep.calibrated_threshold = cal.threshold;
  rep.calibration_saturated = cal.saturated;
  return rep;
}

EvalReport run_eval(const std::vector<LabeledTemplate>& templates, int sweep,
                    const MatchConfig& cfg, double target_far, int jobs) {
  std::vector<int> subjects;
  for (const auto& lt : templates) subjects.push_back(lt.subject);
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  if (subjects.size() < 2)
    throw InsufficientData("evaluation needs >= 2 subjects, got " +
                           std::to_string(subjects.size()));

  struct Pair {
    std::size_t i, j;
    bool genuine;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < templates.size(); ++i)
    for (std::size_t j = i + 1; j < templates.size(); ++j)
      pairs.push_back({i, j, templates[i].subject == templates[j].subject});

  std::size_t n_genuine = 0;
  for (const Pair& p : pairs) n_genuine += p.genuine;
  if (n_genuine == 0) throw InsufficientData("no genuine pairs");
  if (n_genuine == pairs.size()) throw InsufficientData("no impostor pairs");

  // Fixed pair order, per-pair seed: scores do not depend on jobs.
  std::vector<double> scores(pairs.size());
  auto score_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Pair& p = pairs[k];
      MatchConfig pair_cfg = cfg;
      pair_cfg.ga.seed = mix_seed(cfg.ga.seed, p.i, p.j);
      scores[k] = match(templates[p.i].tpl, templates[p.j].tpl, pair_cfg).fused;
    }
  };

  int workers = std::max(1, jobs);
  if (workers == 1) {
    score_range(0, pairs.size());
  } else {
    std::vector<std::thread> threads;
    std::size_t chunk = (pairs.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = static_cast<std::size_t>(w) * chunk;
      std::size_t hi = std::min(pairs.size(), lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back(score_range, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<double> genuine, impostor;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    (pairs[k].genuine ? genuine : impostor).push_back(scores[k]);

  return build_report(std::move(genuine), std::move(impostor), sweep, target_far);
}

Calibration calibrate(const EvalReport& report, double target_far) {
  Calibration cal;
  for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
    if (report.far[i] <= target_far) {
      cal.threshold = report.thresholds[i];
      return cal;
    }
  }
  cal.threshold = report.thresholds.back();
  cal.saturated = true;
  return cal;
}

std::string eval_report_serialize(const EvalReport& rep) {
  std::string out = "EVR1\n";
  auto emit_scores = [&](const char* name, const std::vector<double>& v) {
    out += name;
    out += "=";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += fmt6(v[i]);
    }
    out += '\n';
  };
  out += "genuine_count=" + std::to_string(rep.genuine_scores.size()) + "\n";
  out += "impostor_count=" + std::to_string(rep.impostor_scores.size()) + "\n";
  emit_scores("genuine", rep.genuine_scores);
  emit_scores("impostor", rep.impostor_scores);
  out += "sweep=" + std::to_string(rep.thresholds.size()) + "\n";
  for (std::size_t i = 0; i < rep.thresholds.size(); ++i)
    out += fmt6(rep.thresholds[i]) + " " + fmt6(rep.far[i]) + " " +
           fmt6(rep.frr[i]) + "\n";
  out += "eer=" + fmt6(rep.eer) + "\n";
  out += "target_far=" + fmt6(rep.target_far) + "\n";
  out += "calibrated_threshold=" + fmt6(rep.calibrated_threshold) + "\n";
  out += std::string("calibration_saturated=") +
         (rep.calibration_saturated ? "1" : "0") + "\n";
  out += "end\n";
  return out;
}

namespace {

std::string expect_field(std::istringstream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0)
    throw CorruptLayout("EVR1: missing '" + key + "=' line");
  return line.substr(key.size() + 1);
}

std::vector<double> parse_score_list(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

EvalReport eval_report_parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "EVR1")
    throw CorruptLayout("not an EVR1 stream");

  EvalReport rep;
  try {
    std::size_t ng = std::stoul(expect_field(in, "genuine_count"));
    std::size_t ni = std::stoul(expect_field(in, "impostor_count"));
    rep.genuine_scores = parse_score_list(expect_field(in, "genuine"));
    rep.impostor_scores = parse_score_list(expect_field(in, "impostor"));
    if (rep.genuine_scores.size() != ng || rep.impostor_scores.size() != ni)
      throw CorruptLayout("EVR1: score counts disagree with lists");

    std::size_t sweep = std::stoul(expect_field(in, "sweep"));
    for (std::size_t i = 0; i < sweep; ++i) {
      if (!std::getline(in, line)) throw CorruptLayout("EVR1: short table");
      double t, fa, fr;
      if (std::sscanf(line.c_str(), "%lf %lf %lf", &t, &fa, &fr) != 3)
        throw CorruptLayout("EVR1: bad table row '" + line + "'");
      rep.thresholds.push_back(t);
      rep.far.push_back(fa);
      rep.frr.push_back(fr);
    }
    rep.eer = std::stod(expect_field(in, "eer"));
    rep.target_far = std::stod(expect_field(in, "target_far"));
    rep.calibrated_threshold = std::stod(expect_field(in, "calibrated_threshold"));
    rep.calibration_saturated = expect_field(in, "calibration_saturated") == "1";
  } catch (const CorruptLayout&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptLayout(std::string("EVR1: unparseable field: ") + e.what());
  }
  if (!std::getline(in, line) || line != "end")
    throw CorruptLayout("EVR1: missing end marker");
  return rep;
}

}  // namespace fpgate
