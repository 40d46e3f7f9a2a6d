#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msgr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition: mismatched series, missing jet block,
/// out-of-range coordinate id.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line or file configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Base of every failure caused by the numbers at a sample point rather than
/// by the caller. The batch runner skips points that raise these.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularPointError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateMetricError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace msgr
