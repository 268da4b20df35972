#include "lcmpc/feasible.hpp"

#include <algorithm>
#include <random>

#include "lcmpc/error.hpp"

namespace lcmpc {

bool FeasibleSetResult::Contains(const Eigen::VectorXd& x, int step, double tol) const {
  if (step < 0 || step >= static_cast<int>(per_step.size())) {
    throw Error(ErrorKind::kInvalidArgument, "feasible-set step out of range");
  }
  const auto& pieces = per_step[static_cast<std::size_t>(step)];
  return std::any_of(pieces.begin(), pieces.end(),
                     [&](const Polytope& P) { return P.Contains(x, tol); });
}

Polytope OneStepControllable(const SwitchedAffineSystem& sys, const Polytope& target,
                             int input_index) {
  const Mode& mode = sys.mode(input_index);
  return Intersect(sys.state_constraints(),
                   Preimage(Translate(target, -mode.b), mode.A));
}

FeasibleSetResult ExactFeasibleUnion(const SwitchedAffineSystem& sys,
                                     const std::vector<Polytope>& terminal_sets, int N,
                                     std::int64_t budget) {
  if (N < 0) throw Error(ErrorKind::kInvalidArgument, "horizon must be nonnegative");
  double worst = static_cast<double>(terminal_sets.size());
  for (int i = 0; i < N; ++i) worst *= sys.num_inputs();
  if (worst > static_cast<double>(budget)) {
    throw Error(ErrorKind::kBudgetExceeded,
                "exact feasible union may need " + std::to_string(worst) +
                    " pieces; use the hull approximation instead");
  }
  FeasibleSetResult result;
  result.kind = FeasibleKind::kExactUnion;
  result.N = N;
  std::vector<Polytope> current;
  for (const Polytope& T : terminal_sets) {
    if (!T.IsEmpty()) current.push_back(T);
  }
  result.per_step.push_back(current);
  for (int i = 1; i <= N; ++i) {
    std::vector<Polytope> next;
    for (int u = 0; u < sys.num_inputs(); ++u) {
      for (const Polytope& piece : current) {
        Polytope C = OneStepControllable(sys, piece, u);
        if (C.IsEmpty()) continue;
        const bool duplicate = std::any_of(next.begin(), next.end(), [&](const Polytope& Q) {
          return SetEqual(Q, C);
        });
        if (!duplicate) next.push_back(std::move(C));
      }
    }
    current = std::move(next);
    result.per_step.push_back(current);
  }
  return result;
}

FeasibleSetResult OuterHullFeasible(const SwitchedAffineSystem& sys,
                                    const std::vector<Polytope>& terminal_sets, int N) {
  if (sys.nx() != 2) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "hull approximation is implemented for planar systems only");
  }
  if (N < 0) throw Error(ErrorKind::kInvalidArgument, "horizon must be nonnegative");
  FeasibleSetResult result;
  result.kind = FeasibleKind::kOuterHull;
  result.N = N;
  Polytope hull = ConvexHullUnion2d(terminal_sets);
  result.per_step.push_back({hull});
  for (int i = 1; i <= N; ++i) {
    std::vector<Polytope> pieces;
    for (int u = 0; u < sys.num_inputs(); ++u) {
      Polytope C = OneStepControllable(sys, hull, u);
      if (!C.IsEmpty()) pieces.push_back(std::move(C));
    }
    if (pieces.empty()) {
      throw Error(ErrorKind::kInfeasible,
                  "no state can reach the previous hull at step " + std::to_string(i));
    }
    hull = ConvexHullUnion2d(pieces);
    result.per_step.push_back({hull});
  }
  return result;
}

double NonConvexityGap(const FeasibleSetResult& exact, const FeasibleSetResult& hull,
                       int samples, std::uint64_t seed) {
  const Polytope& H = hull.Final().front();
  const int n = H.dim();
  Eigen::VectorXd lo(n), hi(n);
  for (int d = 0; d < n; ++d) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(d) = 1.0;
    hi(d) = H.Support(e);
    lo(d) = -H.Support(-e);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int inside = 0;
  int missing = 0;
  Eigen::VectorXd x(n);
  for (int s = 0; s < samples; ++s) {
    for (int d = 0; d < n; ++d) x(d) = lo(d) + unit(rng) * (hi(d) - lo(d));
    if (!H.Contains(x)) continue;
    ++inside;
    if (!exact.Contains(x)) ++missing;
  }
  return inside == 0 ? 0.0 : static_cast<double>(missing) / inside;
}

}  // namespace lcmpc
