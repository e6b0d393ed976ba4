#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hake/analogy/glyphs.hpp"
#include "hake/error.hpp"
#include "hake/rng.hpp"

namespace hake::analogy {

inline constexpr int kCanvasSide = 128;
inline constexpr int kCanvasPixels = kCanvasSide * kCanvasSide;
inline constexpr int kNumClasses = 19;  // labels 0..18

struct AnalogyConfig {
  int canvas = kCanvasSide;  // fixed at 128
  int digits_min = 3;
  int digits_max = 5;
  double noise_sigma = 0.1;
  int train_count = 50000;
  int test_count = 10000;
  std::uint64_t seed = 7;

  void validate() const {
    if (canvas != kCanvasSide) throw Error("analogy config: canvas is fixed at 128");
    if (digits_min < 1 || digits_min > digits_max)
      throw Error("analogy config: need 1 <= digits_min <= digits_max");
    if (digits_max > 5) throw Error("analogy config: digits_max is at most 5");
    if (noise_sigma < 0) throw Error("analogy config: noise_sigma must be >= 0");
    if (train_count <= 0 || test_count <= 0)
      throw Error("analogy config: sample counts must be positive");
  }

  bool operator==(const AnalogyConfig&) const = default;
};

struct Placement {
  std::uint8_t digit = 0;
  std::uint16_t x = 0, y = 0;  // top-left of the 28x28 footprint

  bool operator==(const Placement&) const = default;
};

/// One composite scene. Pixels are the post-noise values quantized to bytes
/// (value/255 recovers the clamped [0,1] intensity).
struct AnalogySample {
  std::vector<std::uint8_t> pixels;  // canvas^2
  std::vector<Placement> placements;
  std::uint8_t label = 0;  // largest + second largest digit value
};

struct AnalogyDataset {
  AnalogyConfig config;
  std::vector<AnalogySample> samples;
};

/// Sum of the two largest digit values (multiset semantics: duplicates count).
int top_two_sum(const std::vector<Placement>& placements);

/// One sample: k ~ uniform{digits_min..digits_max} pool glyphs placed by
/// rejection sampling (no footprint overlap, <= 1000 attempts per digit),
/// composed by elementwise max, then Gaussian noise and clamping.
AnalogySample generate_composite(Rng& rng, const DigitPool& pool, const AnalogyConfig& config);

/// Streams `count` samples from per-sample substreams of (seed ^ stream_salt),
/// so the result is independent of thread count.
AnalogyDataset generate_dataset(const DigitPool& pool, const AnalogyConfig& config, int count,
                                std::uint64_t stream_salt, int threads);

inline constexpr std::uint64_t kTrainStreamSalt = 0x7261696E00000000ULL;
inline constexpr std::uint64_t kTestStreamSalt = 0x7465737400000000ULL;

void save_dataset(const AnalogyDataset& dataset, const std::string& path);
AnalogyDataset load_dataset(const std::string& path);

}  // namespace hake::analogy
