#include "lcmpc/maxdet.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "lcmpc/error.hpp"

namespace lcmpc {
namespace {

// Affine matrix function F(v) = sum_k v_k F_k over a subset of variables.
struct AffineLmi {
  std::vector<int> vars;
  std::vector<Eigen::MatrixXd> coeffs;
  Eigen::MatrixXd constant;
};

// Linear scalar constraint c'v <= bound over a subset of variables.
struct LinearConstraint {
  std::vector<int> vars;
  std::vector<double> coeffs;
  double bound = 0.0;
};

class BarrierProblem {
 public:
  BarrierProblem(const std::vector<Eigen::MatrixXd>& A,
                 const std::vector<Polytope>& sets)
      : p_(static_cast<int>(A.size())),
        n_(static_cast<int>(A.front().rows())),
        s_(n_ * (n_ + 1) / 2) {
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n_, n_);
        E(i, j) = 1.0;
        E(j, i) = 1.0;
        basis_.push_back(E);
      }
    }
    for (int j = 0; j < p_; ++j) {
      AffineLmi obj;
      for (int k = 0; k < s_; ++k) {
        obj.vars.push_back(j * s_ + k);
        obj.coeffs.push_back(basis_[static_cast<std::size_t>(k)]);
      }
      obj.constant = Eigen::MatrixXd::Zero(n_, n_);
      objective_.push_back(obj);

      const Eigen::MatrixXd& Aj = A[static_cast<std::size_t>(j)];
      const int next = (j + 1) % p_;
      AffineLmi lmi;
      lmi.constant = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
      for (int k = 0; k < s_; ++k) {
        const Eigen::MatrixXd& E = basis_[static_cast<std::size_t>(k)];
        Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
        F.topLeftCorner(n_, n_) = E;
        F.topRightCorner(n_, n_) = E * Aj.transpose();
        F.bottomLeftCorner(n_, n_) = Aj * E;
        lmi.vars.push_back(j * s_ + k);
        lmi.coeffs.push_back(F);
      }
      for (int k = 0; k < s_; ++k) {
        Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
        F.bottomRightCorner(n_, n_) = basis_[static_cast<std::size_t>(k)];
        const int var = next * s_ + k;
        // p == 1 couples the block with itself; merge coefficients.
        bool merged = false;
        for (std::size_t q = 0; q < lmi.vars.size(); ++q) {
          if (lmi.vars[q] == var) {
            lmi.coeffs[q] += F;
            merged = true;
          }
        }
        if (!merged) {
          lmi.vars.push_back(var);
          lmi.coeffs.push_back(F);
        }
      }
      lmis_.push_back(lmi);

      const Polytope& Z = sets[static_cast<std::size_t>(j)];
      for (int r = 0; r < Z.num_rows(); ++r) {
        const Eigen::RowVectorXd row = Z.H().row(r);
        LinearConstraint lin;
        for (int k = 0; k < s_; ++k) {
          lin.vars.push_back(j * s_ + k);
          lin.coeffs.push_back(row * basis_[static_cast<std::size_t>(k)] * row.transpose());
        }
        lin.bound = Z.h()(r) * Z.h()(r);
        linear_.push_back(lin);
      }
    }
  }

  int num_vars() const { return p_ * s_; }
  double barrier_parameter() const {
    return static_cast<double>(lmis_.size()) * 2 * n_ + static_cast<double>(linear_.size());
  }

  Eigen::VectorXd Pack(const std::vector<Eigen::MatrixXd>& O) const {
    Eigen::VectorXd v(num_vars());
    for (int j = 0; j < p_; ++j) {
      int k = 0;
      for (int a = 0; a < n_; ++a) {
        for (int b = a; b < n_; ++b) {
          v(j * s_ + k) = a == b ? O[static_cast<std::size_t>(j)](a, b)
                                 : 0.5 * (O[static_cast<std::size_t>(j)](a, b) +
                                          O[static_cast<std::size_t>(j)](b, a));
          ++k;
        }
      }
    }
    return v;
  }

  std::vector<Eigen::MatrixXd> Unpack(const Eigen::VectorXd& v) const {
    std::vector<Eigen::MatrixXd> O;
    for (int j = 0; j < p_; ++j) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_, n_);
      for (int k = 0; k < s_; ++k) M += v(j * s_ + k) * basis_[static_cast<std::size_t>(k)];
      O.push_back(M);
    }
    return O;
  }

  // Value of t * (-sum log det O_j) + barrier; nullopt outside the domain.
  std::optional<double> Value(const Eigen::VectorXd& v, double t) const {
    double total = 0.0;
    for (const auto& f : objective_) {
      const auto ld = NegLogDet(f, v);
      if (!ld) return std::nullopt;
      total += t * *ld;
    }
    for (const auto& f : lmis_) {
      const auto ld = NegLogDet(f, v);
      if (!ld) return std::nullopt;
      total += *ld;
    }
    for (const auto& c : linear_) {
      const double slack = c.bound - Dot(c, v);
      if (!(slack > 0.0)) return std::nullopt;
      total -= std::log(slack);
    }
    return total;
  }

  void Derivatives(const Eigen::VectorXd& v, double t, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    grad = Eigen::VectorXd::Zero(num_vars());
    hess = Eigen::MatrixXd::Zero(num_vars(), num_vars());
    for (const auto& f : objective_) AddLogDetTerms(f, v, t, grad, hess);
    for (const auto& f : lmis_) AddLogDetTerms(f, v, 1.0, grad, hess);
    for (const auto& c : linear_) {
      const double slack = c.bound - Dot(c, v);
      for (std::size_t a = 0; a < c.vars.size(); ++a) {
        grad(c.vars[a]) += c.coeffs[a] / slack;
        for (std::size_t b = 0; b < c.vars.size(); ++b) {
          hess(c.vars[a], c.vars[b]) += c.coeffs[a] * c.coeffs[b] / (slack * slack);
        }
      }
    }
  }

  double SumLogDet(const Eigen::VectorXd& v) const {
    double total = 0.0;
    for (const auto& f : objective_) total -= NegLogDet(f, v).value_or(
        std::numeric_limits<double>::quiet_NaN());
    return total;
  }

 private:
  static double Dot(const LinearConstraint& c, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (std::size_t a = 0; a < c.vars.size(); ++a) s += c.coeffs[a] * v(c.vars[a]);
    return s;
  }

  static Eigen::MatrixXd Assemble(const AffineLmi& f, const Eigen::VectorXd& v) {
    Eigen::MatrixXd F = f.constant;
    for (std::size_t a = 0; a < f.vars.size(); ++a) F += v(f.vars[a]) * f.coeffs[a];
    return F;
  }

  static std::optional<double> NegLogDet(const AffineLmi& f, const Eigen::VectorXd& v) {
    const Eigen::LLT<Eigen::MatrixXd> llt(Assemble(f, v));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!(diag(i) > 0.0)) return std::nullopt;
    }
    return -2.0 * diag.array().log().sum();
  }

  // -log det F: gradient -tr(F^-1 F_a), Hessian tr(F^-1 F_a F^-1 F_b).
  static void AddLogDetTerms(const AffineLmi& f, const Eigen::VectorXd& v, double w,
                             Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    const Eigen::LLT<Eigen::MatrixXd> llt(Assemble(f, v));
    std::vector<Eigen::MatrixXd> G;
    G.reserve(f.vars.size());
    for (std::size_t a = 0; a < f.vars.size(); ++a) G.push_back(llt.solve(f.coeffs[a]));
    for (std::size_t a = 0; a < f.vars.size(); ++a) {
      grad(f.vars[a]) -= w * G[a].trace();
      for (std::size_t b = 0; b < f.vars.size(); ++b) {
        hess(f.vars[a], f.vars[b]) += w * (G[a] * G[b]).trace();
      }
    }
  }

  int p_;
  int n_;
  int s_;
  std::vector<Eigen::MatrixXd> basis_;
  std::vector<AffineLmi> objective_;
  std::vector<AffineLmi> lmis_;
  std::vector<LinearConstraint> linear_;
};

}  // namespace

MaxDetResult SolvePeriodicMaxDet(const std::vector<Eigen::MatrixXd>& A,
                                 const std::vector<Polytope>& constraint_sets,
                                 const std::vector<Eigen::MatrixXd>& start,
                                 const MaxDetOptions& options) {
  if (A.empty() || A.size() != constraint_sets.size() || A.size() != start.size()) {
    throw Error(ErrorKind::kInvalidArgument, "SolvePeriodicMaxDet: size mismatch");
  }
  for (const Polytope& Z : constraint_sets) {
    if (Z.num_rows() > 0 && Z.h().minCoeff() <= 0.0) {
      throw Error(ErrorKind::kNoTube, "origin is not interior to a constraint set");
    }
  }
  const BarrierProblem problem(A, constraint_sets);
  Eigen::VectorXd v = problem.Pack(start);
  double t = options.t_init;
  if (!problem.Value(v, t)) {
    throw Error(ErrorKind::kInvalidArgument, "max-det start point is not strictly feasible");
  }

  MaxDetResult result;
  const double theta = problem.barrier_parameter();
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  while (true) {
    for (int it = 0; it < options.max_newton_per_stage; ++it) {
      problem.Derivatives(v, t, grad, hess);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      const Eigen::VectorXd step = -ldlt.solve(grad);
      const double decrement_sq = -grad.dot(step);
      if (decrement_sq / 2.0 <= 1e-12) break;
      const double f0 = *problem.Value(v, t);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const auto f1 = problem.Value(v + alpha * step, t);
        if (f1 && *f1 <= f0 - 0.25 * alpha * decrement_sq) {
          v += alpha * step;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++result.newton_steps;
      if (!moved) break;
    }
    // The objective's own log-det terms scale with t; the barrier part
    // contributes theta / t to the suboptimality bound.
    result.gap_bound = theta / t;
    if (result.gap_bound < options.gap_tol) break;
    t *= options.t_growth;
  }
  result.O = problem.Unpack(v);
  for (auto& O : result.O) O = 0.5 * (O + O.transpose());
  result.sum_log_det = problem.SumLogDet(v);
  return result;
}

}  // namespace lcmpc
