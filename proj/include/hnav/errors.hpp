#pragma once

#include <stdexcept>
#include <string>

namespace hnav {

struct DegenerateChord : std::runtime_error {
  explicit DegenerateChord(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyTrajectory : std::runtime_error {
  explicit EmptyTrajectory(const std::string& what) : std::runtime_error(what) {}
};

struct BoundsViolation : std::runtime_error {
  explicit BoundsViolation(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

struct NoPath : std::runtime_error {
  explicit NoPath(const std::string& what) : std::runtime_error(what) {}
};

struct Infeasible : std::runtime_error {
  explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hnav
