#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/cycle.hpp"
#include "lcmpc/lyap.hpp"
#include "lcmpc/model.hpp"
#include "lcmpc/tube.hpp"

namespace lcmpc {

struct MpcConfig {
  int N = 1;
  StageCost stage;
  PeriodicTerminalCost terminal;
  /// Terminal sets in state coordinates, indexed by phase.
  StateTube terminal_tube;
  LimitCycle cycle;
  /// Enforce x_i in X for 1 <= i <= N-1.
  bool state_constraints = true;
  int threads = 1;
  /// Seed the incumbent with a caller-supplied sequence.
  bool warm_start = false;
};

struct MpcSolution {
  std::vector<int> input_indices;
  std::vector<Eigen::VectorXd> predicted_states;
  double value = 0.0;
  std::int64_t nodes_expanded = 0;
  std::int64_t nodes_pruned = 0;
  bool feasible = false;
};

/// (x_lc((k+i) mod p), u_lc((k+i) mod p)).
std::pair<Eigen::VectorXd, int> ReferenceAt(const LimitCycle& cycle, long k, int i);

/// Phase (k+N) mod p of the terminal set used at time k.
int TerminalPhase(int p, long k, int N);

/// Non-owning view of one terminal set.
struct TerminalSetRef {
  const Polytope* polytope = nullptr;
  const Ellipsoid* ellipsoid = nullptr;

  bool Contains(const Eigen::VectorXd& x, double tol = kFeasTol) const;
};

TerminalSetRef TerminalSetAt(const StateTube& tube, long k, int N);

/// Limit-cycle tracking FCS-MPC solved by exhaustive branch and bound.
class LimitCycleMpc {
 public:
  LimitCycleMpc(const SwitchedAffineSystem& sys, MpcConfig config);

  const MpcConfig& config() const { return config_; }
  const SwitchedAffineSystem& system() const { return sys_; }

  /// Exact minimizer at state x and time k. The optional warm start only
  /// seeds the incumbent and is ignored unless config().warm_start is set.
  MpcSolution Solve(const Eigen::VectorXd& x, long k,
                    const std::vector<int>* warm_start = nullptr) const;

  /// First optimal input; throws kInfeasible when no sequence is admissible.
  Eigen::VectorXd Control(const Eigen::VectorXd& x, long k) const;

  /// Cost of a given sequence, or nullopt when it is inadmissible.
  std::optional<double> SequenceValue(const Eigen::VectorXd& x, long k,
                                      const std::vector<int>& seq) const;

  /// Stage cost l(x - x_ref(k), u - u_ref(k)).
  double StageValue(const Eigen::VectorXd& x, long k, int u) const;

 private:
  const SwitchedAffineSystem& sys_;
  MpcConfig config_;
};

}  // namespace lcmpc
