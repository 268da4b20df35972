#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcmpc {

enum class ErrorKind {
  kInvalidArgument,
  kUnsupportedDimension,
  kUnbounded,
  kNoUniqueCycle,
  kNoFeasibleCycle,
  kNotStabilizing,
  kNoTube,
  kNotConverged,
  kBudgetExceeded,
  kInfeasible,
  kSchema,
};

std::string_view ToString(ErrorKind kind);

/// Exception carrying a machine-readable kind. All library failures are
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ToString(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lcmpc
