#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lcmpc/cycle.hpp"
#include "lcmpc/model.hpp"

namespace lcmpc {

/// Quadratic stage cost |z|_Q^2 + |v|_R^2 with Q, R positive definite.
struct StageCost {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;

  StageCost() = default;
  StageCost(Eigen::MatrixXd q, Eigen::MatrixXd r);

  double operator()(const Eigen::VectorXd& state_err,
                    const Eigen::VectorXd& input_err) const {
    return state_err.dot(Q * state_err) + input_err.dot(R * input_err);
  }
};

/// p-periodic quadratic terminal weights F_j(z) = z' P_j z.
struct PeriodicTerminalCost {
  std::vector<Eigen::MatrixXd> P;
  /// min eig(P_j - A_j' P_{j+1} A_j - Q) for each phase.
  std::vector<double> residuals;

  int period() const { return static_cast<int>(P.size()); }
  const Eigen::MatrixXd& At(long phase) const;
};

struct TerminalCostReport {
  std::vector<double> min_eig_P;
  std::vector<double> decrease_residual;
  double tolerance = 0.0;
  bool pass = false;

  double WorstResidual() const;
};

/// Solves A_j' P_{j+1 mod p} A_j - P_j + Q = 0 for all phases of the cycle.
///
/// The periodic equation collapses to one discrete Lyapunov equation for
/// P_0 over a full period, P_0 = Psi' P_0 Psi + Qacc, with Psi the period map
/// and Qacc the cost accumulated along it. That equation is solved through
/// its Kronecker form and the remaining phases follow by backward
/// substitution. Any solution of the equality satisfies the LMI with zero
/// slack. Throws kNotStabilizing when the period map is not a strict
/// contraction.
PeriodicTerminalCost SolvePeriodicLyapunov(const SwitchedAffineSystem& sys,
                                           const LimitCycle& cycle,
                                           const Eigen::MatrixXd& Q);

TerminalCostReport VerifyTerminalCost(const SwitchedAffineSystem& sys,
                                      const LimitCycle& cycle,
                                      const Eigen::MatrixXd& Q,
                                      const std::vector<Eigen::MatrixXd>& P,
                                      double tol = 1e-7);

/// z' P_{(k+N) mod p} z.
double TerminalCostValue(const std::vector<Eigen::MatrixXd>& P, long k_plus_N,
                         const Eigen::VectorXd& state_err);

double SpectralRadius(const Eigen::MatrixXd& M);
double MinEigenvalue(const Eigen::MatrixXd& S);
double MaxEigenvalue(const Eigen::MatrixXd& S);

}  // namespace lcmpc
