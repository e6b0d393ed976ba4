#include "hake/analogy/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

namespace hake::analogy {

int top_two_sum(const std::vector<Placement>& placements) {
  if (placements.size() < 2) throw Error("top_two_sum: need at least two digits");
  int largest = -1, second = -1;
  for (const Placement& p : placements) {
    const int v = p.digit;
    if (v > largest) {
      second = largest;
      largest = v;
    } else if (v > second) {
      second = v;
    }
  }
  return largest + second;
}

AnalogySample generate_composite(Rng& rng, const DigitPool& pool, const AnalogyConfig& config) {
  config.validate();
  if (pool.count() == 0) throw Error("generate_composite: empty digit pool");

  const int k = static_cast<int>(rng.uniform_int(config.digits_min, config.digits_max));
  const int limit = config.canvas - kGlyphSide;  // inclusive top-left bound

  AnalogySample sample;
  std::vector<int> pool_indices;
  for (int d = 0; d < k; ++d) {
    const int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool.count())));
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const int x = static_cast<int>(rng.uniform_int(0, limit));
      const int y = static_cast<int>(rng.uniform_int(0, limit));
      bool overlaps = false;
      for (const Placement& other : sample.placements)
        overlaps = overlaps || (std::abs(x - other.x) < kGlyphSide &&
                                std::abs(y - other.y) < kGlyphSide);
      if (!overlaps) {
        sample.placements.push_back({pool.labels[pick], static_cast<std::uint16_t>(x),
                                     static_cast<std::uint16_t>(y)});
        pool_indices.push_back(pick);
        placed = true;
      }
    }
    if (!placed)
      throw Error("generate_composite: could not place digit " + std::to_string(d + 1) + " of " +
                  std::to_string(k) + " after 1000 attempts");
  }

  std::vector<float> canvas(static_cast<std::size_t>(config.canvas) * config.canvas, 0.0f);
  for (std::size_t d = 0; d < sample.placements.size(); ++d) {
    const Placement& pl = sample.placements[d];
    const std::uint8_t* glyph = pool.glyph(pool_indices[d]);
    for (int gy = 0; gy < kGlyphSide; ++gy) {
      float* row = canvas.data() + static_cast<std::size_t>(pl.y + gy) * config.canvas + pl.x;
      const std::uint8_t* src = glyph + gy * kGlyphSide;
      for (int gx = 0; gx < kGlyphSide; ++gx)
        row[gx] = std::max(row[gx], static_cast<float>(src[gx]) / 255.0f);
    }
  }

  sample.pixels.resize(canvas.size());
  if (config.noise_sigma > 0) {
    for (std::size_t i = 0; i < canvas.size(); ++i) {
      const double v =
          std::clamp(canvas[i] + config.noise_sigma * rng.gaussian(), 0.0, 1.0);
      sample.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  } else {
    for (std::size_t i = 0; i < canvas.size(); ++i)
      sample.pixels[i] = static_cast<std::uint8_t>(std::lround(canvas[i] * 255.0f));
  }

  sample.label = static_cast<std::uint8_t>(top_two_sum(sample.placements));
  return sample;
}

AnalogyDataset generate_dataset(const DigitPool& pool, const AnalogyConfig& config, int count,
                                std::uint64_t stream_salt, int threads) {
  config.validate();
  if (count <= 0) throw Error("generate_dataset: count must be positive");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));

  AnalogyDataset dataset;
  dataset.config = config;
  dataset.samples.resize(static_cast<std::size_t>(count));

  auto worker = [&](int first, int past) {
    for (int i = first; i < past; ++i) {
      Rng rng = Rng::substream(config.seed ^ stream_salt, static_cast<std::uint64_t>(i));
      dataset.samples[static_cast<std::size_t>(i)] = generate_composite(rng, pool, config);
    }
  };
  if (threads == 1) {
    worker(0, count);
  } else {
    std::vector<std::thread> crew;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int first = t * chunk;
      const int past = std::min(count, first + chunk);
      if (first < past) crew.emplace_back(worker, first, past);
    }
    for (auto& th : crew) th.join();
  }
  return dataset;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError("dataset: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v & 0xFFFFFFFFULL));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint64_t get_u64(std::istream& is) {
  const std::uint64_t lo = get_u32(is);
  const std::uint64_t hi = get_u32(is);
  return lo | (hi << 32);
}

}  // namespace

void save_dataset(const AnalogyDataset& dataset, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("dataset: cannot open " + path + " for writing");
  os.write("ANLG1", 5);
  put_u32(os, 1);  // format version
  const AnalogyConfig& c = dataset.config;
  put_u32(os, static_cast<std::uint32_t>(c.canvas));
  put_u32(os, static_cast<std::uint32_t>(c.digits_min));
  put_u32(os, static_cast<std::uint32_t>(c.digits_max));
  std::uint64_t sigma_bits;
  std::memcpy(&sigma_bits, &c.noise_sigma, 8);
  put_u64(os, sigma_bits);
  put_u32(os, static_cast<std::uint32_t>(c.train_count));
  put_u32(os, static_cast<std::uint32_t>(c.test_count));
  put_u64(os, c.seed);
  put_u32(os, static_cast<std::uint32_t>(dataset.samples.size()));
  for (const AnalogySample& s : dataset.samples) {
    os.put(static_cast<char>(s.label));
    os.put(static_cast<char>(s.placements.size()));
    for (const Placement& p : s.placements) {
      os.put(static_cast<char>(p.digit));
      os.put(static_cast<char>(p.x & 0xFF));
      os.put(static_cast<char>(p.x >> 8));
      os.put(static_cast<char>(p.y & 0xFF));
      os.put(static_cast<char>(p.y >> 8));
    }
    os.write(reinterpret_cast<const char*>(s.pixels.data()),
             static_cast<std::streamsize>(s.pixels.size()));
  }
  if (!os) throw DataError("dataset: write to " + path + " failed");
}

AnalogyDataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("dataset: cannot open " + path);
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "ANLG1", 5) != 0)
    throw DataError("dataset: bad magic in " + path);
  const std::uint32_t version = get_u32(is);
  if (version != 1) throw DataError("dataset: unsupported version " + std::to_string(version));

  AnalogyDataset dataset;
  AnalogyConfig& c = dataset.config;
  c.canvas = static_cast<int>(get_u32(is));
  c.digits_min = static_cast<int>(get_u32(is));
  c.digits_max = static_cast<int>(get_u32(is));
  const std::uint64_t sigma_bits = get_u64(is);
  std::memcpy(&c.noise_sigma, &sigma_bits, 8);
  c.train_count = static_cast<int>(get_u32(is));
  c.test_count = static_cast<int>(get_u32(is));
  c.seed = get_u64(is);
  c.validate();

  const std::uint32_t count = get_u32(is);
  dataset.samples.resize(count);
  const std::size_t n_pixels = static_cast<std::size_t>(c.canvas) * c.canvas;
  for (auto& s : dataset.samples) {
    int label = is.get();
    int k = is.get();
    if (label < 0 || k < 0) throw DataError("dataset: truncated sample header in " + path);
    if (label >= kNumClasses) throw DataError("dataset: label out of range in " + path);
    s.label = static_cast<std::uint8_t>(label);
    s.placements.resize(static_cast<std::size_t>(k));
    for (auto& p : s.placements) {
      unsigned char b[5];
      if (!is.read(reinterpret_cast<char*>(b), 5))
        throw DataError("dataset: truncated placement in " + path);
      p.digit = b[0];
      p.x = static_cast<std::uint16_t>(b[1] | (b[2] << 8));
      p.y = static_cast<std::uint16_t>(b[3] | (b[4] << 8));
    }
    s.pixels.resize(n_pixels);
    if (!is.read(reinterpret_cast<char*>(s.pixels.data()),
                 static_cast<std::streamsize>(n_pixels)))
      throw DataError("dataset: truncated pixel payload in " + path);
  }
  return dataset;
}

}  // namespace hake::analogy
