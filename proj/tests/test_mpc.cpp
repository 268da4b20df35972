#include <gtest/gtest.h>

#include "lcmpc/error.hpp"
#include "lcmpc/mpc.hpp"
#include "lcmpc/search.hpp"
#include "support.hpp"

using namespace lcmpc;

namespace {

struct Ex1Controller {
  SwitchedAffineSystem sys = DiscretizeZoh(testsupport::Example1Continuous(), 0.5);
  MpcConfig cfg;

  explicit Ex1Controller(int N, TubeKind kind = TubeKind::kPolytopic) {
    cfg.N = N;
    cfg.stage = StageCost(Eigen::Matrix2d::Identity(), 0.01 * Eigen::MatrixXd::Identity(1, 1));
    cfg.cycle = SolveCycle(sys, {0, 0, 1});
    cfg.terminal = SolvePeriodicLyapunov(sys, cfg.cycle, cfg.stage.Q);
    const ErrorTube t = kind == TubeKind::kPolytopic
                            ? PolytopicTube(sys, cfg.cycle)
                            : EllipsoidalTube(sys, cfg.cycle, cfg.terminal, EllipsoidBackend::kLyapunovLevel);
    cfg.terminal_tube = LiftToState(t, cfg.cycle);
  }
};

struct Naive {
  bool feasible = false;
  double value = 0;
  std::vector<int> seq;
};

Naive NaiveMpc(const SwitchedAffineSystem& sys, const MpcConfig& cfg, const Eigen::VectorXd& x0, long k) {
  const int ns = sys.num_inputs();
  const int p = cfg.cycle.period();
  long total = 1;
  for (int i = 0; i < cfg.N; ++i) total *= ns;
  Naive best;
  for (long code = 0; code < total; ++code) {
    std::vector<int> seq(cfg.N);
    for (int i = cfg.N - 1, c = static_cast<int>(code); i >= 0; --i, c /= ns) seq[i] = c % ns;
    Eigen::VectorXd x = x0;
    double cost = 0;
    bool ok = true;
    for (int i = 0; i < cfg.N && ok; ++i) {
      const long t = k + i;
      const Eigen::VectorXd z = x - cfg.cycle.states[t % p];
      const Eigen::VectorXd v = sys.inputs()[seq[i]] - sys.inputs()[cfg.cycle.input_indices[t % p]];
      cost += z.dot(cfg.stage.Q * z) + v.dot(cfg.stage.R * v);
      x = sys.mode(seq[i]).A * x + sys.mode(seq[i]).b;
      if (i + 1 < cfg.N) ok = sys.state_constraints().Contains(x);
    }
    const int phase = static_cast<int>((k + cfg.N) % p);
    if (!ok || !cfg.terminal_tube.Contains(phase, x)) continue;
    const Eigen::VectorXd z = x - cfg.cycle.states[phase];
    cost += z.dot(cfg.terminal.P[phase] * z);
    if (!best.feasible || cost < best.value) best = {true, cost, seq};
  }
  return best;
}

}  // namespace

TEST(Mpc, ReferenceIndexing) {
  Ex1Controller c(4);
  const auto [x, u] = ReferenceAt(c.cfg.cycle, 2, 4);
  EXPECT_EQ(x, c.cfg.cycle.states[0]);
  EXPECT_EQ(u, 0);
  EXPECT_EQ(ReferenceAt(c.cfg.cycle, 3, 0).first, c.cfg.cycle.states[0]);
  EXPECT_EQ(TerminalPhase(3, 0, 4), 1);
  EXPECT_EQ(TerminalPhase(1, 17, 4), 0);
  // ingredients repeat with period lcm(p, N)
  for (long k = 0; k < 12; ++k) EXPECT_EQ(TerminalPhase(3, k, 4), TerminalPhase(3, k + 12, 4));
  const TerminalSetRef T = TerminalSetAt(c.cfg.terminal_tube, 0, 4);
  EXPECT_EQ(T.polytope, &c.cfg.terminal_tube.polytopes[1]);
}

TEST(Mpc, OnCycleIsZeroCost) {
  Ex1Controller c(4);
  const LimitCycleMpc mpc(c.sys, c.cfg);
  for (long k = 0; k < 6; ++k) {
    const MpcSolution s = mpc.Solve(c.cfg.cycle.StateAt(k), k);
    ASSERT_TRUE(s.feasible);
    EXPECT_LT(s.value, 1e-20);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(s.input_indices[i], c.cfg.cycle.InputAt(k + i));
      EXPECT_LT((s.predicted_states[i] - c.cfg.cycle.StateAt(k + i)).norm(), 1e-12);
    }
    EXPECT_TRUE(mpc.Control(c.cfg.cycle.StateAt(k), k).isApprox(c.sys.inputs()[c.cfg.cycle.InputAt(k)]));
  }
}

TEST(Mpc, MatchesNaiveEnumeration) {
  for (TubeKind kind : {TubeKind::kPolytopic, TubeKind::kEllipsoidal}) {
    Ex1Controller c(5, kind);
    const LimitCycleMpc mpc(c.sys, c.cfg);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> U(-10, 10);
    int feasible = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const Eigen::Vector2d x(U(rng), U(rng));
      const long k = trial % 7;
      const Naive n = NaiveMpc(c.sys, c.cfg, x, k);
      const MpcSolution s = mpc.Solve(x, k);
      ASSERT_EQ(s.feasible, n.feasible) << trial;
      if (!n.feasible) continue;
      ++feasible;
      EXPECT_NEAR(s.value, n.value, 1e-12 * std::max(1.0, n.value));
      EXPECT_EQ(s.input_indices, n.seq);
      const auto recomputed = mpc.SequenceValue(x, k, s.input_indices);
      ASSERT_TRUE(recomputed.has_value());
      EXPECT_NEAR(*recomputed, s.value, 1e-9);
      for (int i = 0; i < c.cfg.N; ++i) {
        EXPECT_TRUE(s.predicted_states[i + 1] == c.sys.Next(s.predicted_states[i], s.input_indices[i]));
      }
      EXPECT_TRUE(TerminalSetAt(c.cfg.terminal_tube, k, c.cfg.N).Contains(s.predicted_states.back()));
    }
    EXPECT_GT(feasible, 5);
  }
}

TEST(Mpc, ThreadsAndWarmStartDoNotChangeResult) {
  Ex1Controller c(6);
  const LimitCycleMpc serial(c.sys, c.cfg);
  MpcConfig par = c.cfg;
  par.threads = 2;
  par.warm_start = true;
  const LimitCycleMpc parallel(c.sys, par);
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> U(-6, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector2d x(U(rng), U(rng));
    const MpcSolution a = serial.Solve(x, trial);
    std::vector<int> warm(6);
    for (auto& w : warm) w = static_cast<int>(rng() % 2);
    const MpcSolution b = parallel.Solve(x, trial, &warm);
    ASSERT_EQ(a.feasible, b.feasible);
    EXPECT_EQ(a.input_indices, b.input_indices);
    EXPECT_EQ(a.value, b.value);
    if (a.feasible) {
      // seeding with the optimum itself
      const MpcSolution s = parallel.Solve(x, trial, &a.input_indices);
      EXPECT_EQ(s.input_indices, a.input_indices);
    }
  }
}

TEST(Mpc, TiesResolveToSmallestSequence) {
  // two identical modes: every sequence ties, the answer is all zeros
  const FiniteInputSet U({Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  Mode m{Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1),
         Eigen::VectorXd::Zero(1)};
  const SwitchedAffineSystem sys({m, m}, U, Polytope::Box(Eigen::VectorXd::Constant(1, -1), Eigen::VectorXd::Constant(1, 1)));
  struct P {
    int horizon() const { return 3; }
    double Stage(int, const Eigen::VectorXd& x, int, int) const { return x.squaredNorm(); }
    bool Admissible(int, const Eigen::VectorXd&) const { return true; }
    bool TerminalAdmissible(const Eigen::VectorXd&) const { return true; }
    double Terminal(const Eigen::VectorXd&, int) const { return 0.0; }
  };
  const std::vector<int> warm{1, 1, 1};
  for (int threads : {1, 2}) {
    SearchOptions o;
    o.threads = threads;
    o.warm_start = &warm;
    const SearchResult r = BranchAndBound(sys, P{}, Eigen::VectorXd::Ones(1), o);
    ASSERT_TRUE(r.feasible);
    EXPECT_EQ(r.inputs, (std::vector<int>{0, 0, 0}));
  }
}

TEST(Mpc, InfeasibleState) {
  Ex1Controller c(1);
  const LimitCycleMpc mpc(c.sys, c.cfg);
  const Eigen::Vector2d far(-10, 10);
  const MpcSolution s = mpc.Solve(far, 0);
  EXPECT_FALSE(s.feasible);
  try {
    mpc.Control(far, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
  }
}

TEST(Mpc, ConfigValidation) {
  Ex1Controller c(3);
  MpcConfig bad = c.cfg;
  bad.N = 0;
  EXPECT_THROW(LimitCycleMpc(c.sys, bad), Error);
  bad = c.cfg;
  bad.terminal.P.pop_back();
  EXPECT_THROW(LimitCycleMpc(c.sys, bad), Error);
  bad = c.cfg;
  bad.terminal_tube.polytopes.pop_back();
  EXPECT_THROW(LimitCycleMpc(c.sys, bad), Error);
}
