#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lcmpc {

/// Containment tolerance on unit-normalized rows.
inline constexpr double kContainTol = 1e-8;
/// Feasibility tolerance for point membership and LP-based emptiness.
inline constexpr double kFeasTol = 1e-9;

/// Polytope in H-representation {x : H x <= h}.
///
/// Rows are normalized to unit Euclidean norm on construction, so every
/// tolerance comparison on (H, h) is scale-free. Rows whose normal vanishes
/// are dropped when trivially satisfied; a violated zero row makes the set
/// empty.
class Polytope {
 public:
  Polytope() = default;
  Polytope(Eigen::MatrixXd H, Eigen::VectorXd h);

  static Polytope Box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  static Polytope Empty(int dim);

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& h() const { return h_; }
  int dim() const { return static_cast<int>(H_.cols()); }
  int num_rows() const { return static_cast<int>(H_.rows()); }

  bool Contains(const Eigen::VectorXd& x, double tol = kFeasTol) const;
  /// Largest signed violation max_i (H_i x - h_i).
  double Violation(const Eigen::VectorXd& x) const;

  bool IsEmpty() const;
  /// Nonempty with a ball of radius > tol inside.
  bool HasInterior(double tol = 1e-9) const;
  /// Chebyshev center; only meaningful when nonempty.
  Eigen::VectorXd InteriorPoint() const;
  /// max_{x in P} d'x. Throws kUnbounded when unbounded, kInvalidArgument
  /// when P is empty.
  double Support(const Eigen::VectorXd& direction) const;

  bool IsBounded() const;

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
};

/// Ellipsoid {x : (x - c)' Z (x - c) <= 1}.
struct Ellipsoid {
  Eigen::MatrixXd Z;
  Eigen::VectorXd center;

  Ellipsoid() = default;
  Ellipsoid(Eigen::MatrixXd shape, Eigen::VectorXd c);

  int dim() const { return static_cast<int>(Z.rows()); }
  bool Contains(const Eigen::VectorXd& x, double tol = kFeasTol) const;
  /// Value of (x - c)' Z (x - c).
  double Level(const Eigen::VectorXd& x) const;
  /// log det Z^{-1}, which grows with volume.
  double LogDetShapeInverse() const;
};

Polytope Translate(const Polytope& P, const Eigen::VectorXd& v);
/// P minus the singleton {v}: equivalent to translating by -v.
Polytope PontryaginDiffPoint(const Polytope& P, const Eigen::VectorXd& v);
/// {z : A z in P}. Exact; A may be singular.
Polytope Preimage(const Polytope& P, const Eigen::MatrixXd& A);
/// Intersection with redundant rows removed. May be empty.
Polytope Intersect(const Polytope& P, const Polytope& Q);
/// Minimal H-representation. Empty input is returned as Polytope::Empty.
Polytope RemoveRedundancy(const Polytope& P);

bool ContainsPolytope(const Polytope& outer, const Polytope& inner,
                      double tol = kContainTol);
/// Worst margin min_i (h_i - max_{x in inner} H_i x); negative means some
/// point of inner lies outside outer.
double ContainmentMargin(const Polytope& outer, const Polytope& inner);
bool SetEqual(const Polytope& P, const Polytope& Q, double tol = kContainTol);

/// Counterclockwise vertex cycle of a bounded planar polytope.
std::vector<Eigen::Vector2d> Vertices2d(const Polytope& P);
/// H-representation of the convex hull of planar points.
Polytope HullOfPoints2d(std::span<const Eigen::Vector2d> points);
Polytope ConvexHullUnion2d(std::span<const Polytope> sets);

bool EllipsoidInPolytope(const Ellipsoid& E, const Polytope& P,
                         double tol = kContainTol);
/// min_i (h_i - H_i c - sqrt(H_i Z^{-1} H_i')).
double EllipsoidMargin(const Ellipsoid& E, const Polytope& P);

}  // namespace lcmpc
