#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/cycle.hpp"
#include "lcmpc/error.hpp"
#include "lcmpc/geometry.hpp"
#include "lcmpc/lyap.hpp"
#include "lcmpc/model.hpp"

namespace lcmpc {

enum class TubeKind { kEllipsoidal, kPolytopic };
enum class EllipsoidBackend { kMaxDet, kLyapunovLevel };

/// p-periodic invariant tube of the error dynamics z+ = A_j z. Exactly one of
/// `ellipsoids` / `polytopes` is populated, according to `kind`.
struct ErrorTube {
  TubeKind kind = TubeKind::kPolytopic;
  std::vector<Ellipsoid> ellipsoids;
  std::vector<Polytope> polytopes;
  /// Z_j = X minus the cycle state x(j), one per phase.
  std::vector<Polytope> constraint_sets;
  int iterations = 0;

  int period() const { return static_cast<int>(constraint_sets.size()); }
};

/// The same tube translated onto the cycle states.
struct StateTube {
  TubeKind kind = TubeKind::kPolytopic;
  std::vector<Ellipsoid> ellipsoids;
  std::vector<Polytope> polytopes;

  int period() const;
  bool Contains(long phase, const Eigen::VectorXd& x, double tol = kFeasTol) const;
};

struct TubeReport {
  /// Worst invariance margin over phases; negative when some image leaves
  /// the next set.
  double invariance_margin = 0.0;
  /// Worst margin of the sets inside their constraint sets.
  double containment_margin = 0.0;
  /// Smallest distance from the tube center (origin or cycle state) to the
  /// boundary.
  double interior_margin = 0.0;
  double tolerance = 1e-8;
  bool pass = false;
};

/// Thrown when the polytopic recursion hits n_max; carries the last iterate.
class TubeNotConverged : public Error {
 public:
  explicit TubeNotConverged(ErrorTube last)
      : Error(ErrorKind::kNotConverged, "polytopic tube recursion did not converge"),
        last_(std::move(last)) {}
  const ErrorTube& last_iterate() const { return last_; }

 private:
  ErrorTube last_;
};

/// X minus each cycle state.
std::vector<Polytope> ErrorConstraintSets(const SwitchedAffineSystem& sys,
                                          const LimitCycle& cycle);

/// Ellipsoidal tube. The Lyapunov backend scales the terminal-cost level sets
/// {z : z' P_j z <= c} to the largest common level inside all constraint
/// sets; the max-det backend starts from that certificate and maximizes
/// sum_j log det O_j.
ErrorTube EllipsoidalTube(const SwitchedAffineSystem& sys, const LimitCycle& cycle,
                          const PeriodicTerminalCost& terminal,
                          EllipsoidBackend backend = EllipsoidBackend::kMaxDet);

struct PolytopicTubeOptions {
  int n_max = 500;
  /// Called after each full sweep with the sweep index and current sets.
  std::function<void(int, const std::vector<Polytope>&)> on_sweep;
};

/// Backward set recursion: sweep phases p-1..0, intersect each preimage with
/// the previous iterate, stop when an entire sweep leaves all sets unchanged.
ErrorTube PolytopicTube(const SwitchedAffineSystem& sys, const LimitCycle& cycle,
                        const PolytopicTubeOptions& options = {});

StateTube LiftToState(const ErrorTube& tube, const LimitCycle& cycle);

TubeReport VerifyTube(const SwitchedAffineSystem& sys, const LimitCycle& cycle,
                      const ErrorTube& tube);
TubeReport VerifyStateTube(const SwitchedAffineSystem& sys, const LimitCycle& cycle,
                           const StateTube& tube);

}  // namespace lcmpc
