#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "hake/error.hpp"

namespace hake::a2v {

/// Fixed token -> vector table (precomputed language features). File format
/// is TSV: a first line with the dimension, then `token<TAB>v1 v2 ... vd`.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {
    if (dim <= 0) throw Error("embedding table: dimension must be positive");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& token) const { return vectors_.contains(token); }

  void insert(const std::string& token, std::vector<double> vector);

  /// Throws naming the token when it is missing.
  const std::vector<double>& lookup(const std::string& token) const;

  static EmbeddingTable load_tsv(const std::string& path);
  void save_tsv(const std::string& path) const;

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

}  // namespace hake::a2v
