#pragma once

#include <stdexcept>
#include <string>

namespace logitq {

// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or game document (exit code 1 at the CLI boundary).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// An enumeration (raised graph, transition matrix) would exceed its cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// A stage game was queried before its first play.
class StateError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace logitq
