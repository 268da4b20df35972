#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/geometry.hpp"
#include "lcmpc/model.hpp"

namespace lcmpc {

enum class FeasibleKind { kExactUnion, kOuterHull };

/// Feasible-state estimates for horizons 0..N. per_step[i] is a union of
/// polytopes (one polytope for the hull approximation).
struct FeasibleSetResult {
  FeasibleKind kind = FeasibleKind::kExactUnion;
  int N = 0;
  std::vector<std::vector<Polytope>> per_step;

  bool Contains(const Eigen::VectorXd& x, int step, double tol = kFeasTol) const;
  bool Contains(const Eigen::VectorXd& x) const { return Contains(x, N); }
  const std::vector<Polytope>& Final() const { return per_step.back(); }
};

inline constexpr std::int64_t kFeasiblePieceBudget = 100'000;

/// {x in X : A_u x + b_u in target}.
Polytope OneStepControllable(const SwitchedAffineSystem& sys, const Polytope& target,
                             int input_index);

/// Exact N-step feasible set starting from the union of terminal sets,
/// kept as a list of polytopes. Pieces are generated input by input, then
/// piece by piece; empty pieces and exact duplicates are dropped.
FeasibleSetResult ExactFeasibleUnion(const SwitchedAffineSystem& sys,
                                     const std::vector<Polytope>& terminal_sets, int N,
                                     std::int64_t budget = kFeasiblePieceBudget);

/// Convex outer approximation: hull of the terminal sets, then N rounds of
/// per-input one-step sets followed by the hull of their union. Planar only.
FeasibleSetResult OuterHullFeasible(const SwitchedAffineSystem& sys,
                                    const std::vector<Polytope>& terminal_sets, int N);

/// Fraction of uniform samples inside the final hull that are missing from
/// the final exact union. Diagnostic for how non-convex the exact set is.
double NonConvexityGap(const FeasibleSetResult& exact, const FeasibleSetResult& hull,
                       int samples, std::uint64_t seed);

}  // namespace lcmpc
