#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fpgate {

constexpr int kMinImageSide = 32;

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

/// Per-pixel foreground mask; dimensions always equal the source image's.
struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 1 = finger area

  ForegroundMask() = default;
  ForegroundMask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }

  double foreground_ratio() const;
  bool operator==(const ForegroundMask&) const = default;
};

// Binary PGM ("P5", maxval 255) parser. Accepts the usual whitespace and
// '#' comment handling in the header. Throws BadMagic, UnsupportedDepth,
// Truncated, BadDimensions (side < kMinImageSide).
GrayImage load_pgm(std::span<const std::uint8_t> bytes);

// Canonical writer: "P5\n<w> <h>\n255\n" + raw pixels. load_pgm inverts it
// exactly; re-serialized canonical files are byte-identical.
std::vector<std::uint8_t> save_pgm(const GrayImage& img);

// File helpers around the byte-level pair.
GrayImage load_pgm_file(const std::string& path);
void save_pgm_file(const GrayImage& img, const std::string& path);

// Affine mean/variance normalization, clamped to [0,255]. Zero-variance
// input maps every pixel to target_mean.
GrayImage normalize(const GrayImage& img, double target_mean, double target_var);

// Block-wise segmentation: a block is foreground iff its intensity variance
// is >= var_threshold. block must be one of {8,16,32}; the image is
// virtually extended by edge replication so block tiling always covers it.
ForegroundMask segment(const GrayImage& img, int block, double var_threshold);

}  // namespace fpgate
