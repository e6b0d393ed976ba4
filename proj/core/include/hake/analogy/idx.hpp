#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hake/error.hpp"
#include "hake/net/tensor.hpp"

namespace hake::analogy {

/// Parsed IDX container (the MNIST distribution format): big-endian header
/// 0x00 0x00 <type> <ndim>, ndim big-endian u32 sizes, then payload.
/// Only unsigned-byte payloads (type 0x08) are supported.
struct IdxFile {
  std::vector<int> dims;
  std::vector<std::uint8_t> data;

  std::int64_t items() const { return dims.empty() ? 0 : dims[0]; }
};

IdxFile parse_idx(const std::vector<std::uint8_t>& bytes);
IdxFile load_idx_file(const std::string& path);
void save_idx_file(const IdxFile& file, const std::string& path);

/// Paired image/label ingestion: images come back as [N,H,W] floats in
/// [0,1]; counts must agree. Image bytes must be rank 3 (magic 0x00000803),
/// label bytes rank 1 (magic 0x00000801).
struct IdxPair {
  net::Tensor<float> images;
  std::vector<std::uint8_t> labels;
};
IdxPair load_idx(const std::vector<std::uint8_t>& image_bytes,
                 const std::vector<std::uint8_t>& label_bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace hake::analogy
