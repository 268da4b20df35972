#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lcmpc/model.hpp"
#include "lcmpc/mpc.hpp"

namespace lcmpc {

/// Closed-loop record indexed by k - k0. states has one more entry than the
/// per-step fields unless the run halted on an infeasible step.
struct ClosedLoopTrace {
  long k0 = 0;
  std::vector<Eigen::VectorXd> states;
  std::vector<int> input_indices;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> outputs;
  std::vector<double> value;
  std::vector<double> tracking_error;
  std::vector<std::int64_t> nodes_expanded;
  std::vector<std::int64_t> nodes_pruned;
  std::vector<bool> feasible;
  /// Optimal sequence at every step.
  std::vector<std::vector<int>> plans;
  /// Shifted previous plan admissible at this step (true at the first step).
  std::vector<bool> shifted_feasible;
  /// V(k+1) - V(k) + l(k); empty for the baseline.
  std::vector<double> decrease_margin;
  /// x(k) inside the terminal set of its own phase.
  std::vector<bool> in_tube;
  bool halted = false;

  int steps() const { return static_cast<int>(input_indices.size()); }
};

struct BaselineMpcConfig {
  int N = 1;
  double output_weight = 1.0;
  double input_rate_weight = 0.01;
  double terminal_weight = 100.0;
  Eigen::VectorXd reference;
  bool state_constraints = true;
  int threads = 1;
  bool warm_start = false;
};

ClosedLoopTrace RunClosedLoop(const LimitCycleMpc& mpc, const Eigen::VectorXd& x0,
                              long k0, int steps);

/// Standard output-tracking FCS-MPC with an input-rate penalty. The input
/// applied before the first step is taken to be element 0.
ClosedLoopTrace RunBaseline(const SwitchedAffineSystem& sys, const BaselineMpcConfig& cfg,
                            const Eigen::VectorXd& x0, int steps);

struct SteadyStateMetrics {
  int window_start = 0;
  int window_length = 0;
  /// Mean of |y - y_ref| per output component.
  Eigen::VectorXd mean_abs_error;
  /// Smallest q dividing the window with inputs repeating every q steps.
  std::optional<int> input_period;
  Eigen::VectorXd mean_state;
};

/// Window from start to the last multiple of p that fits after a burn-in
/// fraction of the run.
std::pair<int, int> DefaultSteadyStateWindow(int steps, int p, double burn_in = 0.7);

SteadyStateMetrics ComputeSteadyStateMetrics(const ClosedLoopTrace& trace,
                                             const Eigen::VectorXd& reference,
                                             int window_start, int window_length);

}  // namespace lcmpc
