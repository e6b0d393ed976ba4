#include "hake/analogy/idx.hpp"

#include <fstream>

namespace hake::analogy {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void write_be32(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<std::uint8_t>(v >> 24));
  bytes.push_back(static_cast<std::uint8_t>(v >> 16));
  bytes.push_back(static_cast<std::uint8_t>(v >> 8));
  bytes.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxFile parse_idx(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw DataError("idx: truncated header");
  if (bytes[0] != 0 || bytes[1] != 0) throw DataError("idx: bad magic");
  const int type = bytes[2];
  if (type != 0x08)
    throw DataError("idx: unsupported element type " + std::to_string(type) +
                    " (only unsigned byte, 0x08)");
  const int ndim = bytes[3];
  if (ndim < 1 || ndim > 3)
    throw DataError("idx: unsupported dimension count " + std::to_string(ndim));
  if (bytes.size() < 4 + 4 * static_cast<std::size_t>(ndim))
    throw DataError("idx: truncated dimension header");

  IdxFile file;
  std::int64_t expected = 1;
  for (int d = 0; d < ndim; ++d) {
    const std::uint32_t v = read_be32(bytes, 4 + 4 * static_cast<std::size_t>(d));
    file.dims.push_back(static_cast<int>(v));
    expected *= v;
  }
  const std::size_t header = 4 + 4 * static_cast<std::size_t>(ndim);
  const std::int64_t payload = static_cast<std::int64_t>(bytes.size() - header);
  if (payload < expected)
    throw DataError("idx: truncated payload (expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(payload) + ")");
  if (payload > expected)
    throw DataError("idx: trailing bytes after payload (expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(payload) + ")");
  file.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return file;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("idx: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

IdxFile load_idx_file(const std::string& path) {
  try {
    return parse_idx(read_file_bytes(path));
  } catch (const DataError& e) {
    throw DataError(std::string(e.what()) + " [" + path + "]");
  }
}

void save_idx_file(const IdxFile& file, const std::string& path) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(4 + 4 * file.dims.size() + file.data.size());
  bytes.push_back(0);
  bytes.push_back(0);
  bytes.push_back(0x08);
  bytes.push_back(static_cast<std::uint8_t>(file.dims.size()));
  std::int64_t expected = 1;
  for (int d : file.dims) {
    write_be32(bytes, static_cast<std::uint32_t>(d));
    expected *= d;
  }
  if (expected != static_cast<std::int64_t>(file.data.size()))
    throw DataError("idx: payload size does not match dims");
  bytes.insert(bytes.end(), file.data.begin(), file.data.end());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("idx: cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw DataError("idx: write to " + path + " failed");
}

IdxPair load_idx(const std::vector<std::uint8_t>& image_bytes,
                 const std::vector<std::uint8_t>& label_bytes) {
  IdxFile images = parse_idx(image_bytes);
  if (images.dims.size() != 3) throw DataError("idx: expected a rank-3 image file");
  IdxFile labels = parse_idx(label_bytes);
  if (labels.dims.size() != 1) throw DataError("idx: expected a rank-1 label file");
  if (images.dims[0] != labels.dims[0])
    throw DataError("idx: image count " + std::to_string(images.dims[0]) +
                    " does not match label count " + std::to_string(labels.dims[0]));

  IdxPair pair;
  pair.images = net::Tensor<float>::zeros(images.dims);
  for (std::size_t i = 0; i < images.data.size(); ++i)
    pair.images[i] = static_cast<float>(images.data[i]) / 255.0f;
  pair.labels = std::move(labels.data);
  return pair;
}

}  // namespace hake::analogy
