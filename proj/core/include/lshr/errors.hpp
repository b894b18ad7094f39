#pragma once

#include <stdexcept>
#include <string>

namespace lshr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Bad argument: dimension mismatch, out-of-range parameter, empty input.
class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

/// A kernel was called from a state that violates its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

/// Bracket expansion along a chord never left the set.
class UnboundedSetError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unbounded-set"; }
};

/// Threshold adaptation could not find an acceptable level.
class SchedulingError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "scheduling"; }
};

/// Reference oracle failed to converge.
class OracleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "oracle"; }
};

/// Invalid experiment configuration. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const char* kind() const noexcept override { return "config"; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace lshr
