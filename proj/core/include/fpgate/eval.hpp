#pragma once

#include <string>
#include <vector>

#include "fpgate/matcher.hpp"
#include "fpgate/template.hpp"

namespace fpgate {

struct LabeledTemplate {
  int subject = 0;
  int impression = 0;
  Template tpl;
};

struct EvalReport {
  std::vector<double> genuine_scores;
  std::vector<double> impostor_scores;
  std::vector<double> thresholds;  // uniform sweep over [0,1]
  std::vector<double> far;         // nonincreasing in t
  std::vector<double> frr;         // nondecreasing in t
  double eer = 0.0;
  double target_far = 0.01;
  double calibrated_threshold = 0.0;
  bool calibration_saturated = false;
};

// FAR/FRR table from score lists (accept rule: score >= t everywhere).
// EER is taken at the sweep point minimizing |FAR-FRR|, refined by linear
// interpolation between the adjacent sweep points where the curves cross.
EvalReport build_report(std::vector<double> genuine_scores,
                        std::vector<double> impostor_scores, int sweep,
                        double target_far);

// Scores every unordered template pair: same subject -> genuine,
// different subjects -> impostor. Each pair's GA stream is seeded from
// (cfg.ga.seed, i, j), so results are independent of evaluation order and
// worker count. Throws InsufficientData (< 2 subjects, or an empty pair
// class).
EvalReport run_eval(const std::vector<LabeledTemplate>& templates, int sweep,
                    const MatchConfig& cfg, double target_far = 0.01,
                    int jobs = 1);

struct Calibration {
  double threshold = 0.0;
  bool saturated = false;  // no sweep point reached the FAR target
};

// Smallest sweep threshold with FAR <= target_far; the maximum sweep
// threshold (flagged saturated) when none qualifies.
Calibration calibrate(const EvalReport& report, double target_far);

// Line-oriented "EVR1" interchange text, 6 decimals throughout.
std::string eval_report_serialize(const EvalReport& report);
EvalReport eval_report_parse(const std::string& text);  // throws CorruptLayout

}  // namespace fpgate
