#pragma once

#include <optional>
#include <string>

#include "fpgate/image.hpp"
#include "fpgate/matcher.hpp"
#include "fpgate/mlp.hpp"
#include "fpgate/quality.hpp"
#include "fpgate/structure.hpp"
#include "fpgate/surface.hpp"
#include "fpgate/template.hpp"

namespace fpgate {

/// Every knob of the recognition pipeline in one place. Defaults are the
/// documented desk-scale operating point; the CLI maps flags and config
/// file keys onto this.
struct PipelineConfig {
  double norm_mean = 128.0;
  double norm_var = 2000.0;
  QualityConfig quality;
  double sigma_fraction = 0.25;  // surface sigma = fraction * image diagonal
  int levels = 3;
  int top_k = 12;
  StructureConfig structure;
  MatchConfig match;
};

/// Extraction outcome: the quality report always, the template only when
/// the gate passed.
struct ExtractionResult {
  QualityReport report;
  std::optional<Template> tpl;
};

// normalize -> assess -> (gate) -> core/surface -> wavelet + structural
// features. The template's quality scalar is the report's mean coherence.
ExtractionResult build_template(const GrayImage& img, const std::string& id,
                                std::uint8_t access_mask, std::int64_t created,
                                const PipelineConfig& cfg,
                                const Mlp* selector = nullptr);

}  // namespace fpgate
