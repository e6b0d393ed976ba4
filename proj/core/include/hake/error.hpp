#pragma once

#include <stdexcept>
#include <string>

namespace hake {

/// Library-wide error type. Everything that rejects bad input throws this
/// (or a subclass) with a message naming the offending entity.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data (files, records, headers). The CLI maps this family
/// to exit code 2.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

}  // namespace hake
