#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hake/error.hpp"

namespace hake::net {

/// Dense row-major n-dimensional array. The scalar type is a template
/// parameter: training runs in float, gradient verification promotes the
/// same model to double.
template <class T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;

  Tensor(std::vector<int> shape_, std::vector<T> data_)
      : shape(std::move(shape_)), data(std::move(data_)) {
    if (static_cast<std::int64_t>(data.size()) != element_count(shape))
      throw Error("tensor: data length " + std::to_string(data.size()) +
                  " does not match shape " + shape_string(shape));
  }

  static Tensor zeros(std::vector<int> shape_) {
    const auto n = element_count(shape_);
    return Tensor(std::move(shape_), std::vector<T>(static_cast<std::size_t>(n), T(0)));
  }

  /// Allocated but not cleared; for outputs every element of which is
  /// written before being read.
  static Tensor uninitialized(std::vector<int> shape_) {
    const auto n = element_count(shape_);
    Tensor t;
    t.shape = std::move(shape_);
    t.data.resize(static_cast<std::size_t>(n));
    return t;
  }

  static std::int64_t element_count(const std::vector<int>& s) {
    std::int64_t n = 1;
    for (int d : s) {
      if (d <= 0) throw Error("tensor: non-positive dimension in shape " + shape_string(s));
      n *= d;
    }
    return n;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  bool empty() const { return data.empty(); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  static std::string shape_string(const std::vector<int>& s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << "]";
    return os.str();
  }
};

}  // namespace hake::net
