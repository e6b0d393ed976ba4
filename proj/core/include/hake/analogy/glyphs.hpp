#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hake/rng.hpp"

namespace hake::analogy {

inline constexpr int kGlyphSide = 28;
inline constexpr int kGlyphPixels = kGlyphSide * kGlyphSide;

/// Pool of 28x28 grayscale digit images with labels 0-9. Either rendered
/// procedurally (stroke skeletons under random affine jitter; the default
/// when no corpus files are given) or ingested from IDX files.
///
/// `difficulty` scales the rendering jitter from near-clean digits (0) to
/// the calibrated default (1) that stands in for a handwritten corpus.
struct DigitPool {
  std::vector<std::uint8_t> pixels;  // count * 784, row-major
  std::vector<std::uint8_t> labels;

  int count() const { return static_cast<int>(labels.size()); }
  const std::uint8_t* glyph(int i) const {
    return pixels.data() + static_cast<std::size_t>(i) * kGlyphPixels;
  }

  static DigitPool synthetic(int count, std::uint64_t seed, double difficulty = 1.0);
  static DigitPool from_idx(const std::string& images_path, const std::string& labels_path);
};

/// Renders one randomized glyph of the given digit into out[784].
void render_glyph(int digit, Rng& rng, std::uint8_t* out, double difficulty = 1.0);

}  // namespace hake::analogy
