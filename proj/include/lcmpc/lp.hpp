#pragma once

#include <Eigen/Dense>

namespace lcmpc {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Solves max c'x subject to A x <= b with x free.
///
/// The problem is handled through its dual, min b'y s.t. A'y = c, y >= 0,
/// whose tableau has only n rows. This is cheap for the low state dimensions
/// this library targets even when A has hundreds of rows. Bland's rule
/// guarantees termination on degenerate problems. The primal point is
/// recovered from the simplex multipliers of the optimal dual basis.
LpSolution Maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c);

struct ChebyshevBall {
  Eigen::VectorXd center;
  /// Radius of the largest inscribed ball, capped at 1. Negative when the
  /// constraints are infeasible.
  double radius = -1.0;
};

/// Largest ball inside {x : A x <= b}. The radius is capped at one so the
/// problem stays bounded for unbounded sets.
ChebyshevBall InscribedBall(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace lcmpc
