#pragma once

#include <memory>
#include <optional>

#include "lcmpc/config.hpp"
#include "lcmpc/cycle.hpp"
#include "lcmpc/feasible.hpp"
#include "lcmpc/lyap.hpp"
#include "lcmpc/mpc.hpp"
#include "lcmpc/sim.hpp"
#include "lcmpc/tube.hpp"

namespace lcmpc {

/// Lazily evaluated design chain for one experiment: cycle, terminal cost,
/// tube, controller. Each stage is computed on first use and cached.
class Pipeline {
 public:
  explicit Pipeline(ExperimentConfig config, int threads = 1);

  const ExperimentConfig& config() const { return config_; }
  const SwitchedAffineSystem& system() const { return config_.system; }

  /// Synthesis statistics are only available when no sequence was fixed.
  const LimitCycle& Cycle();
  const std::optional<CycleSynthesis>& Synthesis();
  const PeriodicTerminalCost& TerminalCost();
  const ErrorTube& Tube(TubeKind kind);
  const ErrorTube& Tube() { return Tube(config_.mpc.tube); }
  StateTube TerminalTube();
  const LimitCycleMpc& Controller();

  /// Always starts from the polytopic tube.
  FeasibleSetResult Feasible(FeasibleKind kind);
  ClosedLoopTrace Simulate();
  ClosedLoopTrace SimulateBaseline();

 private:
  ExperimentConfig config_;
  int threads_;
  std::optional<LimitCycle> cycle_;
  std::optional<CycleSynthesis> synthesis_;
  std::optional<PeriodicTerminalCost> terminal_;
  std::optional<ErrorTube> polytopic_;
  std::optional<ErrorTube> ellipsoidal_;
  std::unique_ptr<LimitCycleMpc> controller_;
};

}  // namespace lcmpc
