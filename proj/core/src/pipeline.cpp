#include "fpgate/pipeline.hpp"

#include <cmath>

namespace fpgate {

ExtractionResult build_template(const GrayImage& img, const std::string& id,
                                std::uint8_t access_mask, std::int64_t created,
                                const PipelineConfig& cfg, const Mlp* selector) {
  ExtractionResult res;

  GrayImage norm = normalize(img, cfg.norm_mean, cfg.norm_var);
  res.report = assess(norm, cfg.quality);
  if (!res.report.accepted) return res;

  ForegroundMask mask =
      segment(norm, cfg.quality.block, cfg.quality.seg_var_threshold);
  OrientationField of = orientation_field(norm, cfg.quality.block);
  CorePoint core = detect_core(of, mask);

  double diag = std::sqrt(static_cast<double>(img.width) * img.width +
                          static_cast<double>(img.height) * img.height);
  WeightedSurface surface =
      to_surface(norm, of, core, cfg.sigma_fraction * diag);

  Mlp fallback;
  const Mlp* net = selector;
  if (!net) {
    fallback = default_selector_net(cfg.levels);
    net = &fallback;
  }

  Template t;
  t.id = id;
  t.created = created;
  t.access_mask = access_mask;
  t.quality = res.report.mean_coherence;
  t.wavelet = wavelet_feature(surface, *net, cfg.levels, cfg.top_k);
  t.structural = structural_feature(norm, mask, cfg.structure);
  res.tpl = std::move(t);
  return res;
}

}  // namespace fpgate
