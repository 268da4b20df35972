#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/config.hpp"
#include "lcmpc/geometry.hpp"
#include "lcmpc/model.hpp"

namespace testsupport {

inline std::string ConfigPath(const std::string& name) {
  return std::string(LCMPC_SOURCE_DIR) + "/configs/" + name;
}

inline lcmpc::ExperimentConfig Example1Config() { return lcmpc::LoadConfig(ConfigPath("example1.json")); }
inline lcmpc::ExperimentConfig Example2Config() { return lcmpc::LoadConfig(ConfigPath("example2.json")); }

inline lcmpc::ContinuousSwitchedSystem Example1Continuous() {
  lcmpc::ContinuousSwitchedSystem cs;
  Eigen::MatrixXd A1(2, 2), A2(2, 2), b1(2, 1), b2(2, 1);
  A1 << -5.8, -5.9, -4.1, -4.0;
  A2 << 0.1, -0.5, -0.3, -5.0;
  b1 << 0.0, -2.0;
  b2 << -2.0, 2.0;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  cs.modes = {{A1, b1, I, Eigen::MatrixXd::Zero(2, 1)}, {A2, b2, I, Eigen::MatrixXd::Zero(2, 1)}};
  cs.omega = Eigen::VectorXd::Ones(1);
  cs.inputs = lcmpc::FiniteInputSet({Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0)},
                                    {"1", "2"});
  cs.state_constraints = lcmpc::Polytope::Box(Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10));
  return cs;
}

inline lcmpc::ContinuousSwitchedSystem Example2Continuous() {
  const double Vs = 30, Is = 2, RL = 0.2, L = 100e-6, C = 22e-6;
  lcmpc::ContinuousSwitchedSystem cs;
  std::vector<Eigen::VectorXd> values;
  for (int s1 = 0; s1 <= 1; ++s1) {
    for (int s2 = 0; s2 <= 1; ++s2) {
      Eigen::MatrixXd A(2, 2), B(2, 2), Cm(1, 2), D = Eigen::MatrixXd::Zero(1, 2);
      A << 0, s2 / C, -s2 / L, -RL / L;
      B << 0, -1 / C, s1 / L, 0;
      Cm << 1, 0;
      cs.modes.push_back({A, B, Cm, D});
      values.push_back(Eigen::Vector2d(s1, s2));
    }
  }
  cs.omega = Eigen::Vector2d(Vs, Is);
  cs.inputs = lcmpc::FiniteInputSet(values, {"1", "2", "3", "4"});
  cs.state_constraints = lcmpc::Polytope::Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(50, 10));
  return cs;
}

/// Truncated Taylor series with scaling and squaring.
inline Eigen::MatrixXd ExpmTaylor(const Eigen::MatrixXd& M) {
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.1) ++s;
  const Eigen::MatrixXd X = M / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * X / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Vertices of {x : Hx <= h} in the plane by brute-force pairwise
/// intersection, sorted by angle about their mean.
inline std::vector<Eigen::Vector2d> BruteVertices(const Eigen::MatrixXd& H, const Eigen::VectorXd& h,
                                                  double tol = 1e-9) {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < H.rows(); ++i) {
    for (int j = i + 1; j < H.rows(); ++j) {
      Eigen::Matrix2d M;
      M << H.row(i), H.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = M.inverse() * Eigen::Vector2d(h(i), h(j));
      if (((H * x - h).array() <= tol).all()) {
        bool dup = false;
        for (const auto& p : pts) dup = dup || (p - x).norm() < 1e-7;
        if (!dup) pts.push_back(x);
      }
    }
  }
  if (pts.empty()) return pts;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) < std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  return pts;
}

inline double ShoelaceArea(const std::vector<Eigen::Vector2d>& v) {
  double a = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

inline Eigen::MatrixXd RandomMatrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = U(rng);
  return M;
}

/// Random matrix rescaled to the given spectral radius.
inline Eigen::MatrixXd RandomStable(std::mt19937_64& rng, int n, double radius) {
  Eigen::MatrixXd A = RandomMatrix(rng, n, n);
  const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
  return rho > 1e-12 ? Eigen::MatrixXd(A * (radius / rho)) : A;
}

/// Random discrete switched affine system on the box [-1, 1]^n with n_s
/// modes and identity output.
inline lcmpc::SwitchedAffineSystem RandomSystem(std::mt19937_64& rng, int n, int ns,
                                                double radius = 0.8, double offset = 0.2) {
  std::vector<lcmpc::Mode> modes;
  std::vector<Eigen::VectorXd> values;
  for (int i = 0; i < ns; ++i) {
    lcmpc::Mode m;
    m.A = RandomStable(rng, n, radius);
    m.b = RandomMatrix(rng, n, 1, offset);
    m.C = Eigen::MatrixXd::Identity(n, n);
    m.d = Eigen::VectorXd::Zero(n);
    modes.push_back(m);
    values.push_back(Eigen::VectorXd::Constant(1, i));
  }
  return lcmpc::SwitchedAffineSystem(modes, lcmpc::FiniteInputSet(values),
                                     lcmpc::Polytope::Box(-Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n)));
}

}  // namespace testsupport
