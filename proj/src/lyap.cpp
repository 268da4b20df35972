#include "lcmpc/lyap.hpp"

#include <algorithm>
#include <limits>

#include "lcmpc/error.hpp"

namespace lcmpc {
namespace {

Eigen::MatrixXd Sym(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

std::size_t Wrap(long k, int p) {
  return static_cast<std::size_t>(((k % p) + p) % p);
}

}  // namespace

double SpectralRadius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

double MinEigenvalue(const Eigen::MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Sym(S), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double MaxEigenvalue(const Eigen::MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Sym(S), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

StageCost::StageCost(Eigen::MatrixXd q, Eigen::MatrixXd r) : Q(std::move(q)), R(std::move(r)) {
  if (Q.rows() != Q.cols() || R.rows() != R.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "stage weights must be square");
  }
  if (!Q.isApprox(Q.transpose(), 1e-12) || !R.isApprox(R.transpose(), 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "stage weights must be symmetric");
  }
  if (MinEigenvalue(Q) <= 0.0 || MinEigenvalue(R) <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "stage weights must be positive definite");
  }
}

const Eigen::MatrixXd& PeriodicTerminalCost::At(long phase) const {
  return P[Wrap(phase, period())];
}

double TerminalCostReport::WorstResidual() const {
  double worst = std::numeric_limits<double>::infinity();
  for (double r : decrease_residual) worst = std::min(worst, r);
  return worst;
}

PeriodicTerminalCost SolvePeriodicLyapunov(const SwitchedAffineSystem& sys,
                                           const LimitCycle& cycle,
                                           const Eigen::MatrixXd& Q) {
  const int n = sys.nx();
  const int p = cycle.period();
  if (Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorKind::kInvalidArgument, "Q dimension mismatch");
  }
  const double rho = SpectralRadius(PeriodMap(sys, cycle.input_indices));
  if (rho >= 1.0 - 1e-9) {
    throw Error(ErrorKind::kNotStabilizing,
                "period map spectral radius " + std::to_string(rho) + " is not below 1");
  }

  // Psi = A_{p-1} ... A_0 and Qacc = sum_j Phi_j' Q Phi_j, Phi_j = A_{j-1} ... A_0.
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd q_acc = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < p; ++j) {
    q_acc += psi.transpose() * Q * psi;
    psi = sys.mode(cycle.input_indices[static_cast<std::size_t>(j)]).A * psi;
  }
  // vec(Psi' P Psi) = (Psi' kron Psi') vec(P) in column-major order.
  const Eigen::MatrixXd psi_t = psi.transpose();
  Eigen::MatrixXd K(n * n, n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      K.block(r * n, c * n, n, n) = psi_t(r, c) * psi_t;
    }
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - K;
  const Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q_acc.data(), n * n);
  const Eigen::VectorXd vec_p = lhs.fullPivLu().solve(vec_q);

  PeriodicTerminalCost out;
  out.P.assign(static_cast<std::size_t>(p), Eigen::MatrixXd());
  out.P[0] = Sym(Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n));
  for (int j = p - 1; j >= 1; --j) {
    const Eigen::MatrixXd& A = sys.mode(cycle.input_indices[static_cast<std::size_t>(j)]).A;
    out.P[static_cast<std::size_t>(j)] =
        Sym(A.transpose() * out.P[static_cast<std::size_t>((j + 1) % p)] * A + Q);
  }
  out.residuals = VerifyTerminalCost(sys, cycle, Q, out.P).decrease_residual;
  return out;
}

TerminalCostReport VerifyTerminalCost(const SwitchedAffineSystem& sys,
                                      const LimitCycle& cycle,
                                      const Eigen::MatrixXd& Q,
                                      const std::vector<Eigen::MatrixXd>& P,
                                      double tol) {
  const int p = cycle.period();
  if (static_cast<int>(P.size()) != p) {
    throw Error(ErrorKind::kInvalidArgument, "terminal weight count differs from period");
  }
  TerminalCostReport report;
  report.tolerance = tol;
  report.pass = true;
  for (int j = 0; j < p; ++j) {
    const Eigen::MatrixXd& A = sys.mode(cycle.input_indices[static_cast<std::size_t>(j)]).A;
    const Eigen::MatrixXd& Pj = P[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd& Pn = P[static_cast<std::size_t>((j + 1) % p)];
    const double min_p = MinEigenvalue(Pj);
    const double res = MinEigenvalue(Pj - A.transpose() * Pn * A - Q);
    report.min_eig_P.push_back(min_p);
    report.decrease_residual.push_back(res);
    if (!(min_p > 0.0) || res < -tol) report.pass = false;
  }
  return report;
}

double TerminalCostValue(const std::vector<Eigen::MatrixXd>& P, long k_plus_N,
                         const Eigen::VectorXd& state_err) {
  const Eigen::MatrixXd& Pj = P[Wrap(k_plus_N, static_cast<int>(P.size()))];
  return state_err.dot(Pj * state_err);
}

}  // namespace lcmpc
