#include "lcmpc/pipeline.hpp"

#include "lcmpc/error.hpp"

namespace lcmpc {

Pipeline::Pipeline(ExperimentConfig config, int threads)
    : config_(std::move(config)), threads_(threads) {
  if (threads_ < 1) throw Error(ErrorKind::kInvalidArgument, "threads must be >= 1");
}

const LimitCycle& Pipeline::Cycle() {
  if (cycle_) return *cycle_;
  const CycleSettings& s = config_.cycle;
  if (s.sequence) {
    cycle_ = SolveCycle(system(), *s.sequence);
  } else {
    synthesis_ = SynthesizeOptimalCycle(system(), s.p, s.cost, s.constraints, threads_);
    cycle_ = synthesis_->cycle;
  }
  return *cycle_;
}

const std::optional<CycleSynthesis>& Pipeline::Synthesis() {
  Cycle();
  return synthesis_;
}

const PeriodicTerminalCost& Pipeline::TerminalCost() {
  if (!terminal_) terminal_ = SolvePeriodicLyapunov(system(), Cycle(), config_.mpc.Q);
  return *terminal_;
}

const ErrorTube& Pipeline::Tube(TubeKind kind) {
  if (kind == TubeKind::kPolytopic) {
    if (!polytopic_) {
      PolytopicTubeOptions opts;
      opts.n_max = config_.mpc.n_max;
      polytopic_ = PolytopicTube(system(), Cycle(), opts);
    }
    return *polytopic_;
  }
  if (!ellipsoidal_) {
    ellipsoidal_ = EllipsoidalTube(system(), Cycle(), TerminalCost(), config_.mpc.backend);
  }
  return *ellipsoidal_;
}

StateTube Pipeline::TerminalTube() { return LiftToState(Tube(), Cycle()); }

const LimitCycleMpc& Pipeline::Controller() {
  if (controller_) return *controller_;
  MpcConfig mc;
  mc.N = config_.mpc.N;
  mc.stage = StageCost(config_.mpc.Q, config_.mpc.R);
  mc.terminal = TerminalCost();
  mc.terminal_tube = TerminalTube();
  mc.cycle = Cycle();
  mc.state_constraints = config_.mpc.state_constraints;
  mc.threads = threads_;
  mc.warm_start = config_.mpc.warm_start;
  controller_ = std::make_unique<LimitCycleMpc>(system(), std::move(mc));
  return *controller_;
}

FeasibleSetResult Pipeline::Feasible(FeasibleKind kind) {
  const std::vector<Polytope> targets =
      LiftToState(Tube(TubeKind::kPolytopic), Cycle()).polytopes;
  if (kind == FeasibleKind::kExactUnion) return ExactFeasibleUnion(system(), targets, config_.feasible.N);
  return OuterHullFeasible(system(), targets, config_.feasible.N);
}

ClosedLoopTrace Pipeline::Simulate() {
  const SimulationSettings& s = config_.simulation;
  return RunClosedLoop(Controller(), s.x0, s.k0, s.steps);
}

ClosedLoopTrace Pipeline::SimulateBaseline() {
  const SimulationSettings& s = config_.simulation;
  if (!s.baseline) throw Error(ErrorKind::kInvalidArgument, "no baseline configured");
  BaselineMpcConfig b = *s.baseline;
  b.threads = threads_;
  return RunBaseline(system(), b, s.x0, s.steps);
}

}  // namespace lcmpc
