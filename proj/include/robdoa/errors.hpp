#pragma once

#include <stdexcept>
#include <string>

namespace robdoa {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression source. `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Domain error during expression evaluation (log of non-positive,
/// division by zero, non-finite intermediate, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected before any computation ran.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A pipeline-level assertion failed (e.g. controller membership check).
class PipelineError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace robdoa
