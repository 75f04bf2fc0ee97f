#pragma once

#include <cstdint>
#include <string>

#include "fpgate/structure.hpp"
#include "fpgate/wavelets.hpp"

namespace fpgate {

// Access-level bits (Results-and-Benefits personalization set).
enum AccessBits : std::uint8_t {
  kAccessStorage = 1 << 0,
  kAccessEmailRadio = 1 << 1,
  kAccessSeat = 1 << 2,
  kAccessMirror = 1 << 3,
  kAccessClimate = 1 << 4,
  kAccessAll = 0x1f,
};

/// Persisted identity record. Never holds the raw image.
struct Template {
  std::string id;  // <= 64 chars of [A-Za-z0-9_-]
  std::int64_t created = 0;
  std::uint8_t access_mask = 0;  // 5 bits
  double quality = 0.0;          // capture-quality summary (mean coherence)
  WaveletFeature wavelet;
  StructuralFeature structural;

  bool operator==(const Template&) const = default;
};

bool valid_template_id(const std::string& id);

// Text ".fpt" format, LF-terminated lines, floats at 17 significant
// digits (bit-exact round-trip). WaveletFeature.selected is not stored;
// parsing rebuilds it as the indices of nonzero vector entries.
std::string template_serialize(const Template& t);
Template template_parse(const std::string& text);  // throws CorruptLayout

}  // namespace fpgate
