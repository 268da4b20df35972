#include <gtest/gtest.h>

#include "lcmpc/error.hpp"
#include "lcmpc/pipeline.hpp"
#include "lcmpc/sim.hpp"
#include "support.hpp"

using namespace lcmpc;

TEST(Sim, StartOnCycleStaysOnCycle) {
  Pipeline pipe(testsupport::Example1Config());
  const auto& cyc = pipe.Cycle();
  const ClosedLoopTrace t = RunClosedLoop(pipe.Controller(), cyc.StateAt(1), 1, 12);
  ASSERT_EQ(t.steps(), 12);
  for (int s = 0; s < 12; ++s) {
    EXPECT_LT(t.value[s], 1e-20);
    EXPECT_EQ(t.input_indices[s], cyc.InputAt(1 + s));
    EXPECT_LT(t.tracking_error[s], 1e-12);
  }
}

TEST(Sim, Example1ClosedLoop) {
  Pipeline pipe(testsupport::Example1Config());
  const ClosedLoopTrace t = pipe.Simulate();
  ASSERT_FALSE(t.halted);
  ASSERT_EQ(t.steps(), 80);
  ASSERT_EQ(t.states.size(), 81u);
  const auto& X = pipe.system().state_constraints();
  int first = -1;
  for (int s = 0; s < t.steps(); ++s) {
    EXPECT_TRUE(t.feasible[s]);
    EXPECT_TRUE(t.shifted_feasible[s]);
    EXPECT_TRUE(X.Contains(t.states[s]));
    if (first < 0 && t.tracking_error[s] <= 1e-3) first = s;
    if (s + 1 < t.steps() && t.tracking_error[s] > 1e-6) EXPECT_LT(t.value[s + 1], t.value[s]);
  }
  ASSERT_GE(first, 0);
  EXPECT_LE(first, 60);
  for (double d : t.decrease_margin) EXPECT_LE(d, 1e-7);
  // replay reproduces the trace exactly
  Eigen::VectorXd x = t.states[0];
  for (int s = 0; s < t.steps(); ++s) {
    x = pipe.system().Next(x, t.input_indices[s]);
    EXPECT_TRUE(x == t.states[s + 1]);
  }
  for (int s = t.steps() - 10; s < t.steps(); ++s) EXPECT_TRUE(t.in_tube[s]) << s;
}

TEST(Sim, InfeasibleStartIsFlagged) {
  Pipeline pipe(testsupport::Example2Config());
  const ClosedLoopTrace t = RunClosedLoop(pipe.Controller(), Eigen::Vector2d(5, 0), 0, 5);
  EXPECT_TRUE(t.halted);
  ASSERT_EQ(t.feasible.size(), 1u);
  EXPECT_FALSE(t.feasible[0]);
  EXPECT_EQ(t.steps(), 0);
}

TEST(Sim, BaselineHoldsEquilibrium) {
  // x+ = 0.5 x + 0.5 u has the fixed point x = u; starting there with u = 1 costs nothing
  const FiniteInputSet U({Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  std::vector<Mode> modes;
  for (int u = 0; u < 2; ++u) {
    modes.push_back({Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Constant(1, 0.5 * u),
                     Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)});
  }
  const SwitchedAffineSystem sys(modes, U, Polytope::Box(Eigen::VectorXd::Constant(1, -5), Eigen::VectorXd::Constant(1, 5)));
  BaselineMpcConfig b;
  b.N = 3;
  b.reference = Eigen::VectorXd::Ones(1);
  b.input_rate_weight = 0.0;
  const ClosedLoopTrace t = RunBaseline(sys, b, Eigen::VectorXd::Ones(1), 10);
  for (int s = 0; s < 10; ++s) {
    EXPECT_EQ(t.input_indices[s], 1);
    EXPECT_DOUBLE_EQ(t.states[s + 1](0), 1.0);
  }
  b.reference = Eigen::Vector2d::Zero();
  EXPECT_THROW(RunBaseline(sys, b, Eigen::VectorXd::Ones(1), 1), Error);
}

TEST(Sim, BaselineRatePenaltyUsesPreviousInput) {
  // with only the rate term active the baseline never leaves input 0
  const FiniteInputSet U({Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)});
  std::vector<Mode> modes(2, {Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Zero(1),
                              Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)});
  const SwitchedAffineSystem sys(modes, U, Polytope::Box(Eigen::VectorXd::Constant(1, -5), Eigen::VectorXd::Constant(1, 5)));
  BaselineMpcConfig b;
  b.N = 2;
  b.output_weight = 0;
  b.terminal_weight = 0;
  b.reference = Eigen::VectorXd::Zero(1);
  const ClosedLoopTrace t = RunBaseline(sys, b, Eigen::VectorXd::Ones(1), 4);
  for (int s = 0; s < 4; ++s) EXPECT_EQ(t.input_indices[s], 0);
}

TEST(Sim, SteadyStateMetrics) {
  ClosedLoopTrace t;
  for (int s = 0; s < 12; ++s) {
    t.states.push_back(Eigen::VectorXd::Constant(1, s % 3));
    t.input_indices.push_back(s % 3);
    t.outputs.push_back(Eigen::VectorXd::Constant(1, s % 3));
    t.feasible.push_back(true);
  }
  t.states.push_back(Eigen::VectorXd::Zero(1));
  const auto m = ComputeSteadyStateMetrics(t, Eigen::VectorXd::Constant(1, 1.0), 3, 9);
  ASSERT_TRUE(m.input_period.has_value());
  EXPECT_EQ(*m.input_period, 3);
  EXPECT_NEAR(m.mean_abs_error(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.mean_state(0), 1.0, 1e-15);

  ClosedLoopTrace c = t;
  for (auto& u : c.input_indices) u = 2;
  const auto mc = ComputeSteadyStateMetrics(c, Eigen::VectorXd::Constant(1, 1.0), 0, 12);
  EXPECT_EQ(*mc.input_period, 1);

  ClosedLoopTrace r = t;
  r.input_indices = {0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 0};
  EXPECT_FALSE(ComputeSteadyStateMetrics(r, Eigen::VectorXd::Zero(1), 0, 12).input_period.has_value());
  EXPECT_THROW(ComputeSteadyStateMetrics(t, Eigen::VectorXd::Zero(1), 5, 9), Error);

  const auto [start, len] = DefaultSteadyStateWindow(2000, 6, 0.7);
  EXPECT_EQ(start, 1400);
  EXPECT_EQ(len, 600);
  EXPECT_EQ(len % 6, 0);
}
