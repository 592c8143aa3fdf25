#pragma once

#include <stdexcept>
#include <string>

namespace deepspace {

// Base of every error raised by the library. `kind()` is a short stable tag
// used by the CLI for its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// A precondition on an argument or configuration field was violated.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

// Malformed configuration or CSV input.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

// A numerical routine cannot produce a meaningful value (singular
// denominator, zero radiated power, divergent integral, ...).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

}  // namespace detail
}  // namespace deepspace
