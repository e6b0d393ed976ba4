#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "hake/error.hpp"
#include "hake/net/model.hpp"

namespace hake::net {

// Versioned binary checkpoint: magic "TNET1", input shape, layer specs,
// then all parameters as little-endian 32-bit floats in declaration order.

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw DataError("checkpoint: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f32(std::ostream& os, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(os, u);
}

inline float get_f32(std::istream& is) {
  const std::uint32_t u = get_u32(is);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

}  // namespace detail

template <class T>
void save_model(const Model<T>& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("checkpoint: cannot open " + path + " for writing");
  os.write("TNET1", 5);
  detail::put_u32(os, 1);  // format version
  detail::put_u32(os, static_cast<std::uint32_t>(model.input_shape().size()));
  for (int d : model.input_shape()) detail::put_u32(os, static_cast<std::uint32_t>(d));
  detail::put_u32(os, static_cast<std::uint32_t>(model.layers().size()));
  for (const LayerSpec& s : model.layers()) {
    detail::put_u32(os, static_cast<std::uint32_t>(s.kind));
    for (int v : {s.units, s.out_channels, s.kernel_h, s.kernel_w, s.stride, s.pool_h, s.pool_w,
                  s.pool_stride})
      detail::put_u32(os, static_cast<std::uint32_t>(v));
  }
  std::uint64_t count = static_cast<std::uint64_t>(model.parameter_count());
  detail::put_u32(os, static_cast<std::uint32_t>(count & 0xFFFFFFFFu));
  detail::put_u32(os, static_cast<std::uint32_t>(count >> 32));
  for (const auto& p : model.parameters())
    for (std::int64_t i = 0; i < p.size(); ++i) detail::put_f32(os, static_cast<float>(p[i]));
  if (!os) throw DataError("checkpoint: write to " + path + " failed");
}

inline Model<float> load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("checkpoint: cannot open " + path);
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, "TNET1", 5) != 0)
    throw DataError("checkpoint: bad magic in " + path);
  const std::uint32_t version = detail::get_u32(is);
  if (version != 1) throw DataError("checkpoint: unsupported version " + std::to_string(version));
  std::vector<int> input_shape(detail::get_u32(is));
  for (auto& d : input_shape) d = static_cast<int>(detail::get_u32(is));
  std::vector<LayerSpec> layers(detail::get_u32(is));
  for (auto& s : layers) {
    s.kind = static_cast<LayerKind>(detail::get_u32(is));
    int* fields[8] = {&s.units,  &s.out_channels, &s.kernel_h, &s.kernel_w,
                      &s.stride, &s.pool_h,       &s.pool_w,   &s.pool_stride};
    for (int* f : fields) *f = static_cast<int>(detail::get_u32(is));
  }
  const std::uint64_t lo = detail::get_u32(is);
  const std::uint64_t hi = detail::get_u32(is);
  const std::uint64_t count = lo | (hi << 32);

  Model<float> model(input_shape, layers, /*seed=*/0);
  if (static_cast<std::uint64_t>(model.parameter_count()) != count)
    throw DataError("checkpoint: parameter count mismatch in " + path);
  for (auto& p : model.parameters())
    for (std::int64_t i = 0; i < p.size(); ++i) p[i] = detail::get_f32(is);
  return model;
}

}  // namespace hake::net
