#include "lcmpc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lcmpc {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr double kPhaseOneTol = 1e-9;

// Dense tableau for min cost'y s.t. M y = rhs, y >= 0, with one artificial
// column per row appended after the structural columns.
class DualTableau {
 public:
  DualTableau(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs)
      : rows_(static_cast<int>(M.rows())),
        structural_(static_cast<int>(M.cols())),
        table_(Eigen::MatrixXd::Zero(rows_ + 1, structural_ + rows_ + 1)),
        sign_(rows_),
        basis_(rows_) {
    for (int r = 0; r < rows_; ++r) {
      sign_[r] = rhs(r) < 0.0 ? -1.0 : 1.0;
      table_.row(r).head(structural_) = sign_[r] * M.row(r);
      table_(r, structural_ + r) = 1.0;
      table_(r, Rhs()) = sign_[r] * rhs(r);
      basis_[r] = structural_ + r;
    }
  }

  // Returns false when phase one cannot drive the artificials to zero.
  bool PhaseOne() {
    auto obj = table_.row(rows_);
    obj.setZero();
    for (int r = 0; r < rows_; ++r) {
      obj.head(structural_) -= table_.row(r).head(structural_);
      obj(Rhs()) -= table_(r, Rhs());
    }
    Iterate(structural_ + rows_);
    if (-table_(rows_, Rhs()) > kPhaseOneTol * (1.0 + Scale())) return false;
    DriveOutArtificials();
    return true;
  }

  // Returns false when the objective is unbounded below.
  bool PhaseTwo(const Eigen::VectorXd& cost) {
    auto obj = table_.row(rows_);
    obj.setZero();
    obj.head(structural_) = cost.transpose();
    for (int r = 0; r < rows_; ++r) {
      const int j = basis_[r];
      const double cj = j < structural_ ? cost(j) : 0.0;
      if (cj != 0.0) obj -= cj * table_.row(r);
    }
    return Iterate(structural_);
  }

  double Objective() const { return -table_(rows_, Rhs()); }

  // Simplex multipliers of the original (unsigned) equality rows.
  Eigen::VectorXd Multipliers() const {
    Eigen::VectorXd pi(rows_);
    for (int r = 0; r < rows_; ++r) {
      pi(r) = -sign_[r] * table_(rows_, structural_ + r);
    }
    return pi;
  }

 private:
  int Rhs() const { return structural_ + rows_; }

  double Scale() const {
    return table_.col(Rhs()).head(rows_).cwiseAbs().maxCoeff();
  }

  // Bland's rule over columns [0, enter_limit).
  bool Iterate(int enter_limit) {
    const int max_iter = 50 * (rows_ + structural_ + 10);
    for (int iter = 0; iter < max_iter; ++iter) {
      int enter = -1;
      for (int j = 0; j < enter_limit; ++j) {
        if (table_(rows_, j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        const double a = table_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = table_(r, Rhs()) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
    }
    return true;
  }

  void DriveOutArtificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < structural_) continue;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(table_(r, j)) > 1e-9) {
          Pivot(r, j);
          break;
        }
      }
      // A row with no structural entry is redundant; its artificial stays
      // basic at level zero and never re-enters the objective.
    }
  }

  void Pivot(int row, int col) {
    table_.row(row) /= table_(row, col);
    for (int r = 0; r <= rows_; ++r) {
      if (r == row) continue;
      const double f = table_(r, col);
      if (f != 0.0) table_.row(r) -= f * table_.row(row);
    }
    basis_[row] = col;
  }

  int rows_;
  int structural_;
  Eigen::MatrixXd table_;
  std::vector<double> sign_;
  std::vector<int> basis_;
};

LpSolution Solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& c, bool classify_dual_infeasible);

}  // namespace

ChebyshevBall InscribedBall(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd Ab(m + 1, n + 1);
  Eigen::VectorXd bb(m + 1);
  Ab.topLeftCorner(m, n) = A;
  Ab.topRightCorner(m, 1) = A.rowwise().norm();
  Ab.bottomLeftCorner(1, n).setZero();
  Ab(m, n) = 1.0;
  bb.head(m) = b;
  bb(m) = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(n) = 1.0;
  const LpSolution sol = Solve(Ab, bb, c, false);
  ChebyshevBall ball;
  if (sol.status != LpStatus::kOptimal) return ball;
  ball.center = sol.x.head(n);
  ball.radius = sol.x(n);
  return ball;
}

namespace {

LpSolution Solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& c, bool classify_dual_infeasible) {
  LpSolution sol;
  DualTableau tableau(A.transpose(), c);
  if (!tableau.PhaseOne()) {
    // Dual infeasible: the primal is either unbounded or infeasible.
    if (!classify_dual_infeasible) return sol;
    const ChebyshevBall ball = InscribedBall(A, b);
    sol.status = ball.radius >= -1e-9 ? LpStatus::kUnbounded : LpStatus::kInfeasible;
    return sol;
  }
  if (!tableau.PhaseTwo(b)) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x = tableau.Multipliers();
  sol.value = c.dot(sol.x);
  return sol;
}

}  // namespace

LpSolution Maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& c) {
  return Solve(A, b, c, true);
}

}  // namespace lcmpc
