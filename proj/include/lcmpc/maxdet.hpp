#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lcmpc/geometry.hpp"

namespace lcmpc {

struct MaxDetOptions {
  /// Stop when the barrier duality-gap bound falls below this value.
  double gap_tol = 1e-9;
  double t_init = 1.0;
  double t_growth = 10.0;
  int max_newton_per_stage = 100;
};

struct MaxDetResult {
  /// Optimal shape inverses O_j (ellipsoid {z : z' O_j^{-1} z <= 1}).
  std::vector<Eigen::MatrixXd> O;
  double sum_log_det = 0.0;
  double gap_bound = 0.0;
  int newton_steps = 0;
};

/// Maximum-volume periodic invariant ellipsoids:
///
///   max  sum_j log det O_j
///   s.t. [[O_j, O_j A_j'], [A_j O_j, O_{j+1 mod p}]] >= 0
///        H_i O_j H_i' <= h_i^2   for every row of constraint_sets[j]
///
/// Solved by a primal log-barrier method with Newton steps on the symmetric
/// entries of the O_j. `start` must be strictly feasible. Constraint sets need
/// h > 0 rowwise (origin in the interior).
MaxDetResult SolvePeriodicMaxDet(const std::vector<Eigen::MatrixXd>& A,
                                 const std::vector<Polytope>& constraint_sets,
                                 const std::vector<Eigen::MatrixXd>& start,
                                 const MaxDetOptions& options = {});

}  // namespace lcmpc
