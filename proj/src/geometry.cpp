#include "lcmpc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lcmpc/error.hpp"
#include "lcmpc/lp.hpp"

namespace lcmpc {
namespace {

constexpr double kZeroRowTol = 1e-14;
constexpr double kRedundancyTol = 1e-9;

void RequireSameDim(int a, long b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                    " vs " + std::to_string(b) + ")");
  }
}

double Cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
             const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<Eigen::Vector2d> HullCcw(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [eps](const auto& a, const auto& b) {
                          return (a - b).cwiseAbs().maxCoeff() <= eps;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  const double area_eps = eps * scale;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && Cross(hull[k - 2], hull[k - 1], pts[i]) <= area_eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && Cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= area_eps) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// Vertices of a possibly lower-dimensional planar polytope by intersecting
// every pair of rows.
std::vector<Eigen::Vector2d> PairwiseVertices(const Polytope& P) {
  std::vector<Eigen::Vector2d> pts;
  const auto& H = P.H();
  const auto& h = P.h();
  for (int i = 0; i < P.num_rows(); ++i) {
    for (int j = i + 1; j < P.num_rows(); ++j) {
      Eigen::Matrix2d M;
      M << H.row(i), H.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d v = M.lu().solve(Eigen::Vector2d(h(i), h(j)));
      if (P.Violation(v) <= 1e-9 * (1.0 + v.norm())) pts.push_back(v);
    }
  }
  return HullCcw(std::move(pts));
}

}  // namespace

Polytope::Polytope(Eigen::MatrixXd H, Eigen::VectorXd h) {
  RequireSameDim(static_cast<int>(H.rows()), h.size(), "Polytope");
  std::vector<Eigen::Index> keep;
  bool empty = false;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    const double norm = H.row(i).norm();
    if (!std::isfinite(norm) || !std::isfinite(h(i))) {
      throw Error(ErrorKind::kInvalidArgument, "Polytope: non-finite entry");
    }
    if (norm <= kZeroRowTol) {
      if (h(i) < -kFeasTol) empty = true;
      continue;
    }
    if (std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
      H.row(i) /= norm;
      h(i) /= norm;
    }
    keep.push_back(i);
  }
  if (empty) {
    *this = Empty(static_cast<int>(H.cols()));
    return;
  }
  H_.resize(static_cast<Eigen::Index>(keep.size()), H.cols());
  h_.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    H_.row(static_cast<Eigen::Index>(k)) = H.row(keep[k]);
    h_(static_cast<Eigen::Index>(k)) = h(keep[k]);
  }
}

Polytope Polytope::Box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  RequireSameDim(static_cast<int>(lower.size()), upper.size(), "Box");
  const Eigen::Index n = lower.size();
  Eigen::MatrixXd H(2 * n, n);
  H << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd h(2 * n);
  h << upper, -lower;
  return Polytope(std::move(H), std::move(h));
}

Polytope Polytope::Empty(int dim) {
  Polytope P;
  P.H_ = Eigen::MatrixXd::Zero(2, dim);
  P.H_(0, 0) = 1.0;
  P.H_(1, 0) = -1.0;
  P.h_ = Eigen::VectorXd::Constant(2, -1.0);
  return P;
}

double Polytope::Violation(const Eigen::VectorXd& x) const {
  RequireSameDim(dim(), x.size(), "Polytope::Violation");
  if (num_rows() == 0) return -std::numeric_limits<double>::infinity();
  return (H_ * x - h_).maxCoeff();
}

bool Polytope::Contains(const Eigen::VectorXd& x, double tol) const {
  return Violation(x) <= tol;
}

bool Polytope::IsEmpty() const {
  return InscribedBall(H_, h_).radius < -kFeasTol;
}

bool Polytope::HasInterior(double tol) const {
  return InscribedBall(H_, h_).radius > tol;
}

Eigen::VectorXd Polytope::InteriorPoint() const {
  const ChebyshevBall ball = InscribedBall(H_, h_);
  if (ball.radius < -kFeasTol) {
    throw Error(ErrorKind::kInvalidArgument, "InteriorPoint: empty polytope");
  }
  return ball.center;
}

double Polytope::Support(const Eigen::VectorXd& direction) const {
  RequireSameDim(dim(), direction.size(), "Support");
  const LpSolution sol = Maximize(H_, h_, direction);
  if (sol.status == LpStatus::kUnbounded) {
    throw Error(ErrorKind::kUnbounded, "support function is unbounded");
  }
  if (sol.status == LpStatus::kInfeasible) {
    throw Error(ErrorKind::kInvalidArgument, "support of an empty polytope");
  }
  return sol.value;
}

bool Polytope::IsBounded() const {
  for (int i = 0; i < dim(); ++i) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
      d(i) = s;
      if (Maximize(H_, h_, d).status == LpStatus::kUnbounded) return false;
    }
  }
  return true;
}

Ellipsoid::Ellipsoid(Eigen::MatrixXd shape, Eigen::VectorXd c)
    : Z(std::move(shape)), center(std::move(c)) {
  if (Z.rows() != Z.cols() || Z.rows() != center.size()) {
    throw Error(ErrorKind::kInvalidArgument, "Ellipsoid: dimension mismatch");
  }
  if ((Z - Z.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + Z.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::kInvalidArgument, "Ellipsoid: shape not symmetric");
  }
  Z = 0.5 * (Z + Z.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Z, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "Ellipsoid: shape not positive definite");
  }
}

double Ellipsoid::Level(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd d = x - center;
  return d.dot(Z * d);
}

bool Ellipsoid::Contains(const Eigen::VectorXd& x, double tol) const {
  return Level(x) <= 1.0 + tol;
}

double Ellipsoid::LogDetShapeInverse() const {
  return -std::log(Z.determinant());
}

Polytope Translate(const Polytope& P, const Eigen::VectorXd& v) {
  RequireSameDim(P.dim(), v.size(), "Translate");
  return Polytope(P.H(), P.h() + P.H() * v);
}

Polytope PontryaginDiffPoint(const Polytope& P, const Eigen::VectorXd& v) {
  return Translate(P, -v);
}

Polytope Preimage(const Polytope& P, const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "Preimage: matrix must be square");
  }
  RequireSameDim(P.dim(), A.rows(), "Preimage");
  return Polytope(P.H() * A, P.h());
}

Polytope Intersect(const Polytope& P, const Polytope& Q) {
  RequireSameDim(P.dim(), Q.dim(), "Intersect");
  Eigen::MatrixXd H(P.num_rows() + Q.num_rows(), P.dim());
  Eigen::VectorXd h(P.num_rows() + Q.num_rows());
  H << P.H(), Q.H();
  h << P.h(), Q.h();
  return RemoveRedundancy(Polytope(std::move(H), std::move(h)));
}

Polytope RemoveRedundancy(const Polytope& P) {
  if (P.IsEmpty()) return Polytope::Empty(P.dim());
  const int m = P.num_rows();
  const int n = P.dim();
  std::vector<bool> keep(static_cast<std::size_t>(m), true);
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    int rows = 0;
    int self = -1;
    for (int j = 0; j < m; ++j) {
      if (!keep[static_cast<std::size_t>(j)]) continue;
      if (j == i) self = rows;
      A.row(rows) = P.H().row(j);
      b(rows) = P.h()(j);
      ++rows;
    }
    // Relax row i so the LP stays bounded while testing whether the
    // remaining rows already imply it.
    b(self) += 1.0;
    const LpSolution sol = Maximize(A.topRows(rows), b.head(rows), P.H().row(i).transpose());
    if (sol.status == LpStatus::kUnbounded) {
      throw Error(ErrorKind::kUnbounded, "RemoveRedundancy: polytope is unbounded");
    }
    if (sol.status == LpStatus::kOptimal && sol.value <= P.h()(i) + kRedundancyTol) {
      keep[static_cast<std::size_t>(i)] = false;
    }
  }
  const auto count = static_cast<Eigen::Index>(std::count(keep.begin(), keep.end(), true));
  Eigen::MatrixXd H(count, n);
  Eigen::VectorXd h(count);
  Eigen::Index k = 0;
  for (int i = 0; i < m; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    H.row(k) = P.H().row(i);
    h(k) = P.h()(i);
    ++k;
  }
  return Polytope(std::move(H), std::move(h));
}

double ContainmentMargin(const Polytope& outer, const Polytope& inner) {
  RequireSameDim(outer.dim(), inner.dim(), "ContainmentMargin");
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < outer.num_rows(); ++i) {
    const LpSolution sol =
        Maximize(inner.H(), inner.h(), outer.H().row(i).transpose());
    if (sol.status == LpStatus::kInfeasible) {
      return std::numeric_limits<double>::infinity();
    }
    if (sol.status == LpStatus::kUnbounded) {
      return -std::numeric_limits<double>::infinity();
    }
    margin = std::min(margin, outer.h()(i) - sol.value);
  }
  return margin;
}

bool ContainsPolytope(const Polytope& outer, const Polytope& inner, double tol) {
  return ContainmentMargin(outer, inner) >= -tol;
}

bool SetEqual(const Polytope& P, const Polytope& Q, double tol) {
  return ContainsPolytope(P, Q, tol) && ContainsPolytope(Q, P, tol);
}

std::vector<Eigen::Vector2d> Vertices2d(const Polytope& P) {
  if (P.dim() != 2) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "Vertices2d requires a planar polytope, got dimension " +
                    std::to_string(P.dim()));
  }
  if (P.IsEmpty()) {
    throw Error(ErrorKind::kInvalidArgument, "Vertices2d: empty polytope");
  }
  if (!P.IsBounded()) {
    throw Error(ErrorKind::kUnbounded, "Vertices2d: unbounded polytope");
  }
  if (!P.HasInterior()) return PairwiseVertices(P);

  const Polytope R = RemoveRedundancy(P);
  const int m = R.num_rows();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    angle[static_cast<std::size_t>(i)] = std::atan2(R.H()(i, 1), R.H()(i, 0));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return angle[static_cast<std::size_t>(a)] < angle[static_cast<std::size_t>(b)];
  });
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const int i = order[static_cast<std::size_t>(k)];
    const int j = order[static_cast<std::size_t>((k + 1) % m)];
    Eigen::Matrix2d M;
    M << R.H().row(i), R.H().row(j);
    verts.push_back(M.lu().solve(Eigen::Vector2d(R.h()(i), R.h()(j))));
  }
  return verts;
}

Polytope HullOfPoints2d(std::span<const Eigen::Vector2d> points) {
  const std::vector<Eigen::Vector2d> hull =
      HullCcw(std::vector<Eigen::Vector2d>(points.begin(), points.end()));
  if (hull.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument, "HullOfPoints2d: degenerate hull");
  }
  const auto m = static_cast<Eigen::Index>(hull.size());
  Eigen::MatrixXd H(m, 2);
  Eigen::VectorXd h(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Vector2d& a = hull[static_cast<std::size_t>(k)];
    const Eigen::Vector2d& b = hull[static_cast<std::size_t>((k + 1) % m)];
    const Eigen::Vector2d normal(b.y() - a.y(), a.x() - b.x());
    H.row(k) = normal.transpose();
    h(k) = normal.dot(a);
  }
  return Polytope(std::move(H), std::move(h));
}

Polytope ConvexHullUnion2d(std::span<const Polytope> sets) {
  std::vector<Eigen::Vector2d> pts;
  for (const Polytope& P : sets) {
    const auto v = Vertices2d(P);
    pts.insert(pts.end(), v.begin(), v.end());
  }
  return HullOfPoints2d(pts);
}

double EllipsoidMargin(const Ellipsoid& E, const Polytope& P) {
  RequireSameDim(P.dim(), E.dim(), "EllipsoidMargin");
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(E.Z);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.num_rows(); ++i) {
    const Eigen::VectorXd row = P.H().row(i).transpose();
    const double spread = std::sqrt(std::max(0.0, row.dot(ldlt.solve(row))));
    margin = std::min(margin, P.h()(i) - row.dot(E.center) - spread);
  }
  return margin;
}

bool EllipsoidInPolytope(const Ellipsoid& E, const Polytope& P, double tol) {
  return EllipsoidMargin(E, P) >= -tol;
}

}  // namespace lcmpc
