#include "hake/a2v/embedding_table.hpp"

#include <fstream>
#include <sstream>

namespace hake::a2v {

void EmbeddingTable::insert(const std::string& token, std::vector<double> vector) {
  if (dim_ == 0) dim_ = static_cast<int>(vector.size());
  if (static_cast<int>(vector.size()) != dim_)
    throw DataError("embedding table: vector for '" + token + "' has dimension " +
                    std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  vectors_[token] = std::move(vector);
}

const std::vector<double>& EmbeddingTable::lookup(const std::string& token) const {
  auto it = vectors_.find(token);
  if (it == vectors_.end()) throw Error("embedding table: missing token '" + token + "'");
  return it->second;
}

EmbeddingTable EmbeddingTable::load_tsv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("embedding table: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw DataError("embedding table: empty file " + path);
  int dim = 0;
  try {
    dim = std::stoi(line);
  } catch (const std::exception&) {
    throw DataError("embedding table: first line of " + path +
                    " must be the dimension, got '" + line + "'");
  }
  if (dim <= 0) throw DataError("embedding table: non-positive dimension in " + path);

  EmbeddingTable table(dim);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("embedding table: missing tab at " + path + ":" + std::to_string(lineno));
    const std::string token = line.substr(0, tab);
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> vec;
    vec.reserve(static_cast<std::size_t>(dim));
    double v;
    while (values >> v) vec.push_back(v);
    if (static_cast<int>(vec.size()) != dim)
      throw DataError("embedding table: expected " + std::to_string(dim) + " values at " + path +
                      ":" + std::to_string(lineno) + ", got " + std::to_string(vec.size()));
    table.insert(token, std::move(vec));
  }
  return table;
}

void EmbeddingTable::save_tsv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("embedding table: cannot open " + path + " for writing");
  os << dim_ << "\n";
  os.precision(17);
  for (const auto& [token, vec] : vectors_) {
    os << token << "\t";
    for (std::size_t i = 0; i < vec.size(); ++i) os << (i ? " " : "") << vec[i];
    os << "\n";
  }
}

}  // namespace hake::a2v
