#include "hake/analogy/glyphs.hpp"

#include <algorithm>
#include <cmath>

#include "hake/analogy/idx.hpp"
#include "hake/error.hpp"

namespace hake::analogy {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0, y = 0;
};

using Stroke = std::vector<Vec2>;

Stroke line(Vec2 a, Vec2 b, int n) {
  Stroke s;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    s.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
  }
  return s;
}

/// Elliptical arc in unit glyph space (y down), degrees, either direction.
Stroke arc(double cx, double cy, double rx, double ry, double deg0, double deg1, int n) {
  Stroke s;
  for (int i = 0; i <= n; ++i) {
    const double a = (deg0 + (deg1 - deg0) * i / n) * kPi / 180.0;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

/// Stroke skeletons per digit, in [0,1]^2 with y pointing down.
const std::vector<std::vector<Stroke>>& digit_strokes() {
  static const std::vector<std::vector<Stroke>> strokes = [] {
    std::vector<std::vector<Stroke>> d(10);
    d[0] = {arc(0.50, 0.50, 0.32, 0.42, -90, 270, 16)};
    d[1] = {line({0.35, 0.22}, {0.54, 0.08}, 3), line({0.54, 0.08}, {0.54, 0.92}, 6)};
    d[2] = {arc(0.50, 0.30, 0.33, 0.24, 180, 360, 8), line({0.83, 0.30}, {0.17, 0.92}, 6),
            line({0.17, 0.92}, {0.85, 0.92}, 4)};
    d[3] = {arc(0.45, 0.28, 0.30, 0.20, 150, 450, 12), arc(0.45, 0.70, 0.33, 0.22, 270, 520, 12)};
    d[4] = {line({0.60, 0.08}, {0.16, 0.58}, 6), line({0.16, 0.58}, {0.84, 0.58}, 4),
            line({0.62, 0.10}, {0.62, 0.92}, 6)};
    d[5] = {line({0.78, 0.10}, {0.26, 0.10}, 3), line({0.26, 0.10}, {0.23, 0.42}, 3),
            arc(0.47, 0.66, 0.30, 0.26, 240, 515, 12)};
    d[6] = {arc(0.66, 0.48, 0.45, 0.43, 262, 170, 8), arc(0.47, 0.70, 0.26, 0.22, 180, 540, 14)};
    d[7] = {line({0.16, 0.10}, {0.84, 0.10}, 4), line({0.84, 0.10}, {0.55, 0.52}, 4),
            line({0.55, 0.52}, {0.36, 0.92}, 4)};
    d[8] = {arc(0.50, 0.29, 0.26, 0.21, -90, 270, 12), arc(0.50, 0.71, 0.31, 0.23, -90, 270, 12)};
    d[9] = {arc(0.47, 0.30, 0.26, 0.23, 0, 360, 12), line({0.73, 0.30}, {0.70, 0.60}, 3),
            line({0.70, 0.60}, {0.56, 0.92}, 3)};
    return d;
  }();
  return strokes;
}

double dist_to_segment(double px, double py, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = a.x + t * dx, qy = a.y + t * dy;
  return std::hypot(px - qx, py - qy);
}

// Rendering jitter ranges, interpolated by the difficulty knob between a
// near-clean setting (difficulty 0) and the calibrated default (1). The
// defaults are tuned against the paradigm-comparison accuracy bands.
struct JitterParams {
  double max_rotation;   // radians
  double scale_lo, scale_hi;
  double max_shear;
  double max_shift;      // pixels
  double anchor_jitter;  // unit glyph space
  double thickness_lo, thickness_hi;
  double ink_lo;
};

constexpr JitterParams kCleanJitter = {0.12, 0.82, 1.05, 0.10, 0.8, 0.015, 1.3, 2.2, 0.80};
constexpr JitterParams kFullJitter = {0.62, 0.48, 1.00, 0.52, 2.2, 0.090, 0.75, 2.6, 0.38};

JitterParams blend_jitter(double difficulty) {
  const double d = std::clamp(difficulty, 0.0, 1.0);
  auto mix = [d](double lo, double hi) { return lo + d * (hi - lo); };
  JitterParams p;
  p.max_rotation = mix(kCleanJitter.max_rotation, kFullJitter.max_rotation);
  p.scale_lo = mix(kCleanJitter.scale_lo, kFullJitter.scale_lo);
  p.scale_hi = mix(kCleanJitter.scale_hi, kFullJitter.scale_hi);
  p.max_shear = mix(kCleanJitter.max_shear, kFullJitter.max_shear);
  p.max_shift = mix(kCleanJitter.max_shift, kFullJitter.max_shift);
  p.anchor_jitter = mix(kCleanJitter.anchor_jitter, kFullJitter.anchor_jitter);
  p.thickness_lo = mix(kCleanJitter.thickness_lo, kFullJitter.thickness_lo);
  p.thickness_hi = mix(kCleanJitter.thickness_hi, kFullJitter.thickness_hi);
  p.ink_lo = mix(kCleanJitter.ink_lo, kFullJitter.ink_lo);
  return p;
}

}  // namespace

void render_glyph(int digit, Rng& rng, std::uint8_t* out, double difficulty) {
  if (digit < 0 || digit > 9) throw Error("render_glyph: digit out of range");
  const JitterParams jp = blend_jitter(difficulty);

  const double rot = rng.uniform(-jp.max_rotation, jp.max_rotation);
  const double sx = rng.uniform(jp.scale_lo, jp.scale_hi);
  const double sy = rng.uniform(jp.scale_lo, jp.scale_hi);
  const double shear = rng.uniform(-jp.max_shear, jp.max_shear);
  const double tx = rng.uniform(-jp.max_shift, jp.max_shift);
  const double ty = rng.uniform(-jp.max_shift, jp.max_shift);
  const double radius = rng.uniform(jp.thickness_lo, jp.thickness_hi);
  const double ink = rng.uniform(jp.ink_lo, 1.0);

  const double cr = std::cos(rot), sr = std::sin(rot);
  // Map a unit-space anchor into the 20px glyph box at offset 4, with
  // rotation/shear/scale about the glyph center.
  auto to_pixels = [&](Vec2 p) {
    double x = (p.x - 0.5) * sx;
    double y = (p.y - 0.5) * sy;
    x += shear * y;
    const double xr = cr * x - sr * y;
    const double yr = sr * x + cr * y;
    return Vec2{14.0 + 20.0 * xr + tx, 14.0 + 20.0 * yr + ty};
  };

  std::vector<Stroke> strokes;
  for (const Stroke& proto : digit_strokes()[digit]) {
    Stroke s;
    s.reserve(proto.size());
    for (Vec2 p : proto) {
      p.x += rng.gaussian(0, jp.anchor_jitter);
      p.y += rng.gaussian(0, jp.anchor_jitter);
      s.push_back(to_pixels(p));
    }
    strokes.push_back(std::move(s));
  }

  float canvas[kGlyphPixels] = {0};
  for (const Stroke& s : strokes) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const Vec2 a = s[i], b = s[i + 1];
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
      const int x1 = std::min(kGlyphSide - 1,
                              static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
      const int y1 = std::min(kGlyphSide - 1,
                              static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dist = dist_to_segment(x + 0.5, y + 0.5, a, b);
          const double coverage = std::clamp(radius + 0.5 - dist, 0.0, 1.0);
          if (coverage > 0) {
            float& px = canvas[y * kGlyphSide + x];
            px = std::max(px, static_cast<float>(ink * coverage));
          }
        }
      }
    }
  }
  for (int i = 0; i < kGlyphPixels; ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(canvas[i], 0.0f, 1.0f) * 255.0f));
}

DigitPool DigitPool::synthetic(int count, std::uint64_t seed, double difficulty) {
  if (count <= 0) throw Error("digit pool: count must be positive");
  DigitPool pool;
  pool.pixels.resize(static_cast<std::size_t>(count) * kGlyphPixels);
  pool.labels.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const int digit = static_cast<int>(rng.below(10));
    pool.labels[i] = static_cast<std::uint8_t>(digit);
    render_glyph(digit, rng, pool.pixels.data() + static_cast<std::size_t>(i) * kGlyphPixels,
                 difficulty);
  }
  return pool;
}

DigitPool DigitPool::from_idx(const std::string& images_path, const std::string& labels_path) {
  IdxFile images = load_idx_file(images_path);
  if (images.dims.size() != 3) throw DataError("idx: expected a rank-3 image file");
  if (images.dims[1] != kGlyphSide || images.dims[2] != kGlyphSide)
    throw DataError("digit pool: images must be 28x28, got " + std::to_string(images.dims[1]) +
                    "x" + std::to_string(images.dims[2]));
  IdxFile labels = load_idx_file(labels_path);
  if (labels.dims.size() != 1) throw DataError("idx: expected a rank-1 label file");
  if (images.dims[0] != labels.dims[0])
    throw DataError("idx: image count " + std::to_string(images.dims[0]) +
                    " does not match label count " + std::to_string(labels.dims[0]));
  for (std::uint8_t label : labels.data)
    if (label > 9) throw DataError("digit pool: label out of range 0-9");
  DigitPool pool;
  pool.pixels = std::move(images.data);
  pool.labels = std::move(labels.data);
  return pool;
}

}  // namespace hake::analogy
