#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad grid, alpha outside [0,1), r0 >= 1/9, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Initial data that violates a structural requirement (no decay at the
/// boundary, not C^1, perturbation leaving the ball).
class InitialDataError : public Error {
 public:
  using Error::Error;
};

/// q dropped to or below the floor, so the absolute value in the kernel
/// exponent can no longer be resolved monotonically.
class MonotonicityLoss : public Error {
 public:
  MonotonicityLoss(std::size_t index, double value, double floor);

  std::size_t index() const { return index_; }
  double value() const { return value_; }

 private:
  std::size_t index_;
  double value_;
};

/// A runtime guard tripped during time integration.
class GuardBreach : public Error {
 public:
  GuardBreach(const std::string& what, double time, std::size_t node, int stage);

  double time() const { return time_; }
  std::size_t node() const { return node_; }
  /// RK stage (1..4) at which the breach was detected, 0 for post-step checks.
  int stage() const { return stage_; }

 private:
  double time_;
  std::size_t node_;
  int stage_;
};

/// A flow map that is not strictly increasing, or a point outside its image.
class FlowMapError : public Error {
 public:
  using Error::Error;
};

}  // namespace fw
