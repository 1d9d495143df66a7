#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scenegt {

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time or index argument lies outside the domain of the data.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A metric has a zero denominator and no documented convention applies.
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or truncated file. `offset` is the byte (or line, for text
// formats) where decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scenegt
