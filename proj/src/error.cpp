#include "lcmpc/error.hpp"

namespace lcmpc {

std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kUnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::kUnbounded: return "unbounded";
    case ErrorKind::kNoUniqueCycle: return "no-unique-cycle";
    case ErrorKind::kNoFeasibleCycle: return "no-feasible-cycle";
    case ErrorKind::kNotStabilizing: return "not-stabilizing";
    case ErrorKind::kNoTube: return "no-tube";
    case ErrorKind::kNotConverged: return "not-converged";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kSchema: return "schema";
  }
  return "unknown";
}

}  // namespace lcmpc
