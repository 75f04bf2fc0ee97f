#include "fpgate/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fpgate/errors.hpp"

namespace fpgate {

double ForegroundMask::foreground_ratio() const {
  if (bits.empty()) return 0.0;
  std::size_t n = 0;
  for (auto b : bits) n += (b != 0);
  return static_cast<double>(n) / static_cast<double>(bits.size());
}

namespace {

// PGM header scanner: whitespace separates tokens, '#' starts a comment
// that runs to end of line.
struct HeaderScanner {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }

  void skip_space_and_comments() {
    while (!eof()) {
      std::uint8_t c = bytes[pos];
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' ||
                 c == '\v' || c == '\f') {
        ++pos;
      } else {
        break;
      }
    }
  }

  // Reads an unsigned decimal token.
  long next_uint(const char* what) {
    skip_space_and_comments();
    if (eof() || bytes[pos] < '0' || bytes[pos] > '9')
      throw Truncated(std::string("missing ") + what + " in PGM header");
    long value = 0;
    while (!eof() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1000000000L) throw BadDimensions("PGM header value overflow");
      ++pos;
    }
    return value;
  }
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw BadMagic("expected binary PGM magic \"P5\"");

  HeaderScanner sc{bytes, 2};
  long w = sc.next_uint("width");
  long h = sc.next_uint("height");
  long maxval = sc.next_uint("maxval");
  if (maxval != 255)
    throw UnsupportedDepth("PGM maxval " + std::to_string(maxval) +
                           " not supported, only 255");
  if (w < kMinImageSide || h < kMinImageSide)
    throw BadDimensions("image " + std::to_string(w) + "x" + std::to_string(h) +
                        " below minimum side " + std::to_string(kMinImageSide));

  // Exactly one whitespace byte separates the header from the raster.
  if (sc.eof()) throw Truncated("PGM ends after header");
  ++sc.pos;

  std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - sc.pos < need)
    throw Truncated("PGM raster has " + std::to_string(bytes.size() - sc.pos) +
                    " bytes, needs " + std::to_string(need));

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::copy_n(bytes.data() + sc.pos, need, img.pixels.data());
  return img;
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  std::string header = "P5\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

GrayImage load_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

void save_pgm_file(const GrayImage& img, const std::string& path) {
  auto bytes = save_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("short write to " + path);
}

GrayImage normalize(const GrayImage& img, double target_mean, double target_var) {
  double mean = 0.0;
  for (auto p : img.pixels) mean += p;
  mean /= static_cast<double>(img.pixels.size());

  double var = 0.0;
  for (auto p : img.pixels) {
    double d = p - mean;
    var += d * d;
  }
  var /= static_cast<double>(img.pixels.size());

  GrayImage out(img.width, img.height);
  if (var == 0.0) {
    std::uint8_t v = static_cast<std::uint8_t>(
        std::clamp(std::lround(target_mean), 0L, 255L));
    std::fill(out.pixels.begin(), out.pixels.end(), v);
    return out;
  }

  double gain = std::sqrt(target_var / var);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v = target_mean + (img.pixels[i] - mean) * gain;
    out.pixels[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

ForegroundMask segment(const GrayImage& img, int block, double var_threshold) {
  if (block != 8 && block != 16 && block != 32)
    throw BadDimensions("segment block must be 8, 16 or 32");

  ForegroundMask mask(img.width, img.height);
  int cols = (img.width + block - 1) / block;
  int rows = (img.height + block - 1) / block;

  for (int by = 0; by < rows; ++by) {
    for (int bx = 0; bx < cols; ++bx) {
      // Edge replication: out-of-range coordinates clamp to the border,
      // so partial blocks see their edge pixels repeated.
      double sum = 0.0, sum2 = 0.0;
      for (int dy = 0; dy < block; ++dy) {
        int y = std::min(by * block + dy, img.height - 1);
        for (int dx = 0; dx < block; ++dx) {
          int x = std::min(bx * block + dx, img.width - 1);
          double p = img.at(x, y);
          sum += p;
          sum2 += p * p;
        }
      }
      double n = static_cast<double>(block) * block;
      double m = sum / n;
      double var = sum2 / n - m * m;
      if (var >= var_threshold) {
        for (int dy = 0; dy < block; ++dy) {
          int y = by * block + dy;
          if (y >= img.height) break;
          for (int dx = 0; dx < block; ++dx) {
            int x = bx * block + dx;
            if (x >= img.width) break;
            mask.at(x, y) = 1;
          }
        }
      }
    }
  }
  return mask;
}

}  // namespace fpgate
