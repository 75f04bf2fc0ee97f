// fpgate: fingerprint enrollment, verification and evaluation CLI.
//
// Exit codes: 0 accept/ok, 1 reject, 2 error, 3 quality-reject.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <string>

#include "fpgate/errors.hpp"
#include "fpgate/eval.hpp"
#include "fpgate/pipeline.hpp"
#include "fpgate/store.hpp"
#include "fpgate/synth.hpp"
#include "fpgate/telemetry.hpp"

namespace fs = std::filesystem;
using namespace fpgate;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;
constexpr int kExitQualityReject = 3;

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// key=value config file; '#' starts a comment line.
std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoFailure("config line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

// Flags shared by the pipeline-driving subcommands. Flag values override
// config file values; the config file overrides the built-in defaults.
struct PipelineArgs {
  std::string config_path;
  PipelineConfig cfg;

  CLI::Option* opt_norm_mean = nullptr;
  CLI::Option* opt_norm_var = nullptr;
  CLI::Option* opt_block = nullptr;
  CLI::Option* opt_threshold = nullptr;
  CLI::Option* opt_seed = nullptr;

  void attach(CLI::App* cmd, bool with_matcher) {
    cmd->add_option("--config", config_path, "key=value config file");
    opt_norm_mean = cmd->add_option("--norm-mean", cfg.norm_mean,
                                    "normalization target mean");
    opt_norm_var = cmd->add_option("--norm-var", cfg.norm_var,
                                   "normalization target variance");
    opt_block = cmd->add_option("--block", cfg.quality.block,
                                "block size (8, 16 or 32)");
    if (with_matcher) {
      opt_threshold = cmd->add_option("--threshold", cfg.match.threshold,
                                      "accept threshold on the fused score");
      opt_seed = cmd->add_option("--seed", cfg.match.ga.seed,
                                 "genetic aligner seed");
    }
  }

  // Resolve precedence after parsing.
  void finalize() {
    if (config_path.empty()) {
      sync_block();
      return;
    }
    auto kv = load_config(config_path);
    auto get = [&](const char* key, auto& slot, CLI::Option* opt) {
      if (opt && opt->count() > 0) return;  // flag wins
      auto it = kv.find(key);
      if (it == kv.end()) return;
      using T = std::decay_t<decltype(slot)>;
      if constexpr (std::is_same_v<T, int>)
        slot = std::stoi(it->second);
      else if constexpr (std::is_same_v<T, std::uint64_t>)
        slot = std::stoull(it->second);
      else
        slot = std::stod(it->second);
    };
    get("norm_mean", cfg.norm_mean, opt_norm_mean);
    get("norm_var", cfg.norm_var, opt_norm_var);
    get("block", cfg.quality.block, opt_block);
    get("seg_var_threshold", cfg.quality.seg_var_threshold, nullptr);
    get("min_foreground", cfg.quality.min_foreground, nullptr);
    get("min_contrast", cfg.quality.min_contrast, nullptr);
    get("min_coherence", cfg.quality.min_coherence, nullptr);
    get("sigma_fraction", cfg.sigma_fraction, nullptr);
    get("levels", cfg.levels, nullptr);
    get("top_k", cfg.top_k, nullptr);
    get("border", cfg.structure.border, nullptr);
    get("curvature_threshold", cfg.structure.curvature_threshold, nullptr);
    get("count_cap", cfg.structure.count_cap, nullptr);
    get("dist_cap", cfg.structure.dist_cap, nullptr);
    get("w_struct", cfg.match.w_struct, nullptr);
    get("w_wavelet", cfg.match.w_wavelet, nullptr);
    get("w_embed", cfg.match.w_embed, nullptr);
    get("threshold", cfg.match.threshold, opt_threshold);
    get("ga_population", cfg.match.ga.population, nullptr);
    get("ga_generations", cfg.match.ga.generations, nullptr);
    get("ga_crossover", cfg.match.ga.crossover_rate, nullptr);
    get("ga_mutation", cfg.match.ga.mutation_rate, nullptr);
    get("ga_elite", cfg.match.ga.elite, nullptr);
    get("ga_seed", cfg.match.ga.seed, opt_seed);
    get("pair_radius", cfg.match.ga.pair_radius, nullptr);
    get("pair_angle", cfg.match.ga.pair_angle, nullptr);
    get("max_shift", cfg.match.ga.max_shift, nullptr);
    get("max_rot", cfg.match.ga.max_rot, nullptr);
    sync_block();
  }

  void sync_block() { cfg.structure.block = cfg.quality.block; }
};

std::string resolve_db(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FPGATE_DB")) return env;
  throw IoFailure("no store directory: pass --db or set FPGATE_DB");
}

void print_quality(const QualityReport& rep) {
  std::cout << "foreground_ratio=" << fmt6(rep.foreground_ratio) << "\n"
            << "mean_contrast=" << fmt6(rep.mean_contrast) << "\n"
            << "mean_coherence=" << fmt6(rep.mean_coherence) << "\n";
  std::cout << "quality=" << (rep.accepted ? "ACCEPT" : "REJECT") << "\n";
  for (const auto& r : rep.reasons) std::cout << "reason=" << r << "\n";
}

int quality_reject(StoreHandle* store, const std::string& subject,
                   const QualityReport& rep) {
  print_quality(rep);
  if (store) {
    EventRecord e;
    e.ts = std::time(nullptr);
    e.kind = EventKind::QUALITY_REJECT;
    e.subject = subject;
    std::string reasons;
    for (const auto& r : rep.reasons) {
      if (!reasons.empty()) reasons += ',';
      reasons += r;
    }
    e.detail = reasons;
    store->log_event(e);
  }
  return kExitQualityReject;
}

int cmd_enroll(const std::string& db, const std::string& id,
               const std::string& image, int access, bool overwrite,
               const PipelineConfig& cfg) {
  if (access < 0 || access > kAccessAll)
    throw BadDimensions("--access must be in [0,31]");
  StoreHandle store = StoreHandle::open(resolve_db(db));
  GrayImage img = load_pgm_file(image);
  ExtractionResult res =
      build_template(img, id, static_cast<std::uint8_t>(access),
                     std::time(nullptr), cfg);
  if (!res.tpl) return quality_reject(&store, id, res.report);

  store.enroll(*res.tpl, overwrite);
  std::cout << "enrolled=" << id << "\n"
            << "minutiae=" << res.tpl->structural.minutiae.size() << "\n"
            << "quality=" << fmt6(res.tpl->quality) << "\n"
            << "access=" << access << "\n";
  return kExitOk;
}

struct AlertArgs {
  std::string alert_file;
  std::string alert_url;
  int max_rejects = 3;
  std::int64_t window_seconds = 60;

  std::vector<Sink> sinks() const {
    std::vector<Sink> out;
    if (!alert_file.empty()) out.push_back({SinkKind::FILE, alert_file});
    if (!alert_url.empty()) out.push_back({SinkKind::HTTP_POST, alert_url});
    return out;
  }
};

// Replays the event log through the alert state machine and reports the
// alert (if any) fired by the final event.
std::optional<Alert> alert_for_latest(const StoreHandle& store,
                                      const AlertRule& rule) {
  AlertMonitor monitor;
  std::optional<Alert> latest;
  for (const EventRecord& e : store.read_events())
    latest = monitor.observe(e, rule);
  return latest;
}

int cmd_verify(const std::string& db, const std::string& id,
               const std::string& image, const PipelineConfig& cfg,
               const AlertArgs& alerts) {
  StoreHandle store = StoreHandle::open(resolve_db(db));
  Template stored = store.get(id);  // UnknownId -> exit 2

  GrayImage img = load_pgm_file(image);
  ExtractionResult res =
      build_template(img, "probe", 0, std::time(nullptr), cfg);
  if (!res.tpl) return quality_reject(&store, id, res.report);

  MatchScore ms = match(*res.tpl, stored, cfg.match);
  std::cout << "score=" << fmt6(ms.fused) << "\n"
            << "decision=" << (ms.accepted ? "ACCEPT" : "REJECT") << "\n";

  EventRecord e;
  e.ts = std::time(nullptr);
  e.kind = ms.accepted ? EventKind::VERIFY_ACCEPT : EventKind::VERIFY_REJECT;
  e.subject = id;
  e.score = ms.fused;
  e.detail = "threshold=" + fmt6(cfg.match.threshold);
  store.log_event(e);

  AlertRule rule{alerts.max_rejects, alerts.window_seconds};
  if (auto alert = alert_for_latest(store, rule)) {
    EventRecord ae;
    ae.ts = alert->ts;
    ae.kind = EventKind::ALERT;
    ae.subject = alert->subject;
    ae.detail = alert->detail;
    store.log_event(ae);
    std::cout << "alert=" << alert->subject << "\n";
    for (const SinkResult& sr : dispatch(*alert, alerts.sinks()))
      if (!sr.ok) std::cerr << "sink error: " << sr.error << "\n";
  }
  return ms.accepted ? kExitOk : kExitReject;
}

int cmd_identify(const std::string& db, const std::string& image,
                 const PipelineConfig& cfg) {
  StoreHandle store = StoreHandle::open(resolve_db(db));
  std::vector<std::string> ids = store.list();
  if (ids.empty()) throw EmptyGallery("store has no enrolled templates");

  GrayImage img = load_pgm_file(image);
  ExtractionResult res =
      build_template(img, "probe", 0, std::time(nullptr), cfg);
  if (!res.tpl) return quality_reject(nullptr, "-", res.report);

  std::string best_id;
  double best_score = -1.0;
  for (const std::string& id : ids) {
    MatchScore ms = match(*res.tpl, store.get(id), cfg.match);
    if (ms.fused > best_score) {
      best_score = ms.fused;
      best_id = id;
    }
  }
  bool accepted = best_score >= cfg.match.threshold;
  std::cout << "best=" << best_id << "\n"
            << "score=" << fmt6(best_score) << "\n"
            << "decision=" << (accepted ? "ACCEPT" : "REJECT") << "\n";
  return accepted ? kExitOk : kExitReject;
}

int cmd_synth(const std::string& out_dir, const SynthSpec& spec) {
  fs::create_directories(out_dir);
  for (int s = 0; s < spec.subjects; ++s)
    for (int i = 0; i < spec.impressions; ++i)
      save_pgm_file(synth_fingerprint(spec, s, i),
                    (fs::path(out_dir) / synth_name(s, i)).string());
  std::cout << "written=" << spec.subjects * spec.impressions << "\n"
            << "dir=" << out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& data_dir, int sweep,
             const std::string& report_path, double target_far, int jobs,
             const PipelineConfig& cfg) {
  std::regex name_re("s([0-9]+)_i([0-9]+)\\.pgm");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data_dir))
    files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<LabeledTemplate> templates;
  for (const fs::path& p : files) {
    std::smatch m;
    std::string name = p.filename().string();
    if (!std::regex_match(name, m, name_re)) continue;
    GrayImage img = load_pgm_file(p.string());
    std::string stem = p.stem().string();
    ExtractionResult res = build_template(img, stem, 0, 0, cfg);
    if (!res.tpl) {
      std::cerr << "skipping " << name << ": quality reject\n";
      continue;
    }
    templates.push_back({std::stoi(m[1]), std::stoi(m[2]), std::move(*res.tpl)});
  }

  EvalReport report = run_eval(templates, sweep, cfg.match, target_far, jobs);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write report to " + report_path);
    out << eval_report_serialize(report);
  }
  std::cout << "genuine=" << report.genuine_scores.size() << "\n"
            << "impostor=" << report.impostor_scores.size() << "\n"
            << "eer=" << fmt6(report.eer) << "\n"
            << "calibrated_threshold=" << fmt6(report.calibrated_threshold)
            << "\n";
  if (report.calibration_saturated)
    std::cerr << "warning: CalibrationSaturated: no sweep point reaches FAR <= "
              << target_far << "\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& report_path, double target_far) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw IoFailure("cannot read report " + report_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  EvalReport report = eval_report_parse(text);
  Calibration cal = calibrate(report, target_far);
  std::cout << fmt6(cal.threshold) << "\n";
  if (cal.saturated)
    std::cerr << "warning: CalibrationSaturated: no sweep point reaches FAR <= "
              << target_far << "\n";
  return kExitOk;
}

int cmd_quality(const std::string& image, const PipelineConfig& cfg) {
  GrayImage img = load_pgm_file(image);
  QualityReport rep = assess(normalize(img, cfg.norm_mean, cfg.norm_var),
                             cfg.quality);
  print_quality(rep);
  return rep.accepted ? kExitOk : kExitQualityReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fpgate: fingerprint enrollment, verification and evaluation"};
  app.require_subcommand(1);

  // enroll
  auto* enroll = app.add_subcommand("enroll", "enroll a fingerprint image");
  std::string en_db, en_id, en_image;
  int en_access = 0;
  bool en_overwrite = false;
  PipelineArgs en_args;
  enroll->add_option("--db", en_db, "store directory (or FPGATE_DB)");
  enroll->add_option("--id", en_id, "template id")->required();
  enroll->add_option("--image", en_image, "PGM file")->required();
  enroll->add_option("--access", en_access, "access mask 0..31");
  enroll->add_flag("--overwrite", en_overwrite, "replace an existing id");
  en_args.attach(enroll, false);

  // verify
  auto* verify = app.add_subcommand("verify", "verify a probe against an id");
  std::string ve_db, ve_id, ve_image;
  PipelineArgs ve_args;
  AlertArgs ve_alerts;
  verify->add_option("--db", ve_db, "store directory (or FPGATE_DB)");
  verify->add_option("--id", ve_id, "claimed template id")->required();
  verify->add_option("--image", ve_image, "PGM file")->required();
  verify->add_option("--alert-file", ve_alerts.alert_file, "FILE alert sink");
  verify->add_option("--alert-url", ve_alerts.alert_url, "HTTP_POST alert sink");
  verify->add_option("--alert-max-rejects", ve_alerts.max_rejects,
                     "consecutive rejects before an alert");
  verify->add_option("--alert-window", ve_alerts.window_seconds,
                     "alert window in seconds");
  ve_args.attach(verify, true);

  // identify
  auto* identify = app.add_subcommand("identify", "match against the gallery");
  std::string id_db, id_image;
  PipelineArgs id_args;
  identify->add_option("--db", id_db, "store directory (or FPGATE_DB)");
  identify->add_option("--image", id_image, "PGM file")->required();
  id_args.attach(identify, true);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic gallery");
  std::string sy_out;
  SynthSpec sy_spec;
  synth->add_option("--out", sy_out, "output directory")->required();
  synth->add_option("--subjects", sy_spec.subjects, "subject count");
  synth->add_option("--impressions", sy_spec.impressions, "impressions per subject");
  synth->add_option("--seed", sy_spec.seed, "generator seed");
  synth->add_option("--size", sy_spec.size, "square image side, px");
  synth->add_option("--noise-sigma", sy_spec.noise_sigma, "additive noise sigma");
  synth->add_option("--max-shift", sy_spec.max_shift, "impression shift bound, px");
  synth->add_option("--max-rot", sy_spec.max_rot, "impression rotation bound, rad");

  // eval
  auto* eval = app.add_subcommand("eval", "FAR/FRR evaluation over a gallery");
  std::string ev_data, ev_report;
  int ev_sweep = 1001, ev_jobs = 1;
  double ev_target_far = 0.01;
  PipelineArgs ev_args;
  eval->add_option("--data", ev_data, "directory of s<k>_i<j>.pgm files")->required();
  eval->add_option("--sweep", ev_sweep, "threshold sweep points");
  eval->add_option("--report", ev_report, "EVR1 report output file");
  eval->add_option("--target-far", ev_target_far, "calibration FAR target");
  eval->add_option("--jobs", ev_jobs, "worker threads (same scores regardless)");
  ev_args.attach(eval, true);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "threshold from an EVR1 report");
  std::string ca_report;
  double ca_target_far = 0.01;
  cal->add_option("--report", ca_report, "EVR1 report file")->required();
  cal->add_option("--target-far", ca_target_far, "FAR target");

  // quality
  auto* quality = app.add_subcommand("quality", "capture-quality gate report");
  std::string qu_image;
  PipelineArgs qu_args;
  quality->add_option("--image", qu_image, "PGM file")->required();
  qu_args.attach(quality, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enroll) {
      en_args.finalize();
      return cmd_enroll(en_db, en_id, en_image, en_access, en_overwrite, en_args.cfg);
    }
    if (*verify) {
      ve_args.finalize();
      return cmd_verify(ve_db, ve_id, ve_image, ve_args.cfg, ve_alerts);
    }
    if (*identify) {
      id_args.finalize();
      return cmd_identify(id_db, id_image, id_args.cfg);
    }
    if (*synth) return cmd_synth(sy_out, sy_spec);
    if (*eval) {
      ev_args.finalize();
      return cmd_eval(ev_data, ev_sweep, ev_report, ev_target_far, ev_jobs, ev_args.cfg);
    }
    if (*cal) return cmd_calibrate(ca_report, ca_target_far);
    if (*quality) {
      qu_args.finalize();
      return cmd_quality(qu_image, qu_args.cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
