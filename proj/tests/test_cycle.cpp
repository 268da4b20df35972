#include <gtest/gtest.h>

#include <algorithm>

#include "lcmpc/cycle.hpp"
#include "lcmpc/error.hpp"
#include "support.hpp"

using namespace lcmpc;

namespace {

SwitchedAffineSystem Ex1() { return DiscretizeZoh(testsupport::Example1Continuous(), 0.5); }
SwitchedAffineSystem Ex2() { return DiscretizeZoh(testsupport::Example2Continuous(), 1.0 / 400000.0); }

// Fixed point of one full period, then forward propagation.
std::vector<Eigen::VectorXd> CycleByPeriodMap(const SwitchedAffineSystem& sys, const std::vector<int>& seq) {
  const int n = sys.nx();
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int u : seq) {
    Phi = sys.mode(u).A * Phi;
    c = sys.mode(u).A * c + sys.mode(u).b;
  }
  std::vector<Eigen::VectorXd> xs{(Eigen::MatrixXd::Identity(n, n) - Phi).lu().solve(c)};
  for (std::size_t j = 0; j + 1 < seq.size(); ++j) xs.push_back(sys.Next(xs.back(), seq[j]));
  return xs;
}

}  // namespace

TEST(Cycle, Example1PrintedStates) {
  const LimitCycle c = SolveCycle(Ex1(), {0, 0, 1});
  const double expected[3][2] = {{0.0763, 0.2475}, {0.3674, -0.5657}, {0.9950, -1.1970}};
  ASSERT_EQ(c.period(), 3);
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(c.states[j](0), expected[j][0], 5e-4);
    EXPECT_NEAR(c.states[j](1), expected[j][1], 5e-4);
  }
  EXPECT_LT(c.closure_residual, 1e-12);
  EXPECT_TRUE(c.warning.empty());
  EXPECT_EQ(c.InputAt(4), 0);
  EXPECT_EQ(c.StateAt(5), c.states[2]);
}

TEST(Cycle, Example2PrintedStates) {
  const LimitCycle c = SolveCycle(Ex2(), {0, 0, 1, 1, 3, 2});
  const double expected[6][2] = {{18.3900, 4.6343}, {18.1627, 4.6112}, {17.9355, 4.5882},
                                 {18.2027, 4.1146}, {18.4159, 3.6374}, {18.6173, 3.9056}};
  for (int j = 0; j < 6; ++j) {
    EXPECT_NEAR(c.states[j](0), expected[j][0], 5e-4);
    EXPECT_NEAR(c.states[j](1), expected[j][1], 5e-4);
  }
}

TEST(Cycle, MatchesPeriodMapFixedPoint) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const auto sys = testsupport::RandomSystem(rng, n, 3, 0.9, 1.0);
    std::vector<int> seq;
    for (int j = 0; j < 1 + trial % 5; ++j) seq.push_back(static_cast<int>(rng() % 3));
    const LimitCycle c = SolveCycle(sys, seq);
    const auto ref = CycleByPeriodMap(sys, seq);
    for (std::size_t j = 0; j < seq.size(); ++j) {
      EXPECT_LT((c.states[j] - ref[j]).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_LT(c.closure_residual, 1e-10);
  }
}

TEST(Cycle, PeriodMapAndMonodromyOrder) {
  const auto sys = Ex1();
  const std::vector<int> seq{0, 0, 1};
  const Eigen::MatrixXd A0 = sys.mode(0).A, A1 = sys.mode(1).A;
  EXPECT_TRUE(PeriodMap(sys, seq).isApprox(A1 * A0 * A0));
  EXPECT_TRUE(Monodromy(sys, seq).isApprox(A0 * A0 * A1));
}

TEST(Cycle, EigenvalueOneHasNoUniqueCycle) {
  const FiniteInputSet U({Eigen::VectorXd::Zero(1)});
  Mode m{Eigen::Matrix2d::Identity(), Eigen::Vector2d(0.1, 0), Eigen::MatrixXd::Identity(2, 2),
         Eigen::Vector2d::Zero()};
  const SwitchedAffineSystem sys({m}, U, Polytope::Box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)));
  try {
    SolveCycle(sys, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoUniqueCycle);
  }
  EXPECT_THROW(SolveCycle(sys, {}), Error);
  EXPECT_THROW(SolveCycle(sys, {1}), Error);
}

TEST(Cycle, CostNorms) {
  LimitCycle c;
  c.input_indices = {0, 0};
  c.states = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  c.outputs = {Eigen::Vector2d(1, -2), Eigen::Vector2d(3, 0)};
  CycleCostSpec spec;
  spec.reference = {Eigen::Vector2d(0, 0)};
  // mean error (2, -1)
  spec.norm = CycleNorm::kOne;
  EXPECT_DOUBLE_EQ(CycleCost(c, spec), 3.0);
  spec.norm = CycleNorm::kTwo;
  EXPECT_DOUBLE_EQ(CycleCost(c, spec), std::sqrt(5.0));
  spec.norm = CycleNorm::kInf;
  EXPECT_DOUBLE_EQ(CycleCost(c, spec), 2.0);
  spec.reference = {Eigen::Vector2d(1, -2), Eigen::Vector2d(3, 0)};
  EXPECT_DOUBLE_EQ(CycleCost(c, spec), 0.0);
  spec.reference = {Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)};
  EXPECT_THROW(CycleCost(c, spec), Error);
}

TEST(Cycle, CanonicalRotation) {
  EXPECT_TRUE(IsCanonicalRotation({0, 0, 1}));
  EXPECT_FALSE(IsCanonicalRotation({0, 1, 0}));
  EXPECT_FALSE(IsCanonicalRotation({1, 0, 0}));
  EXPECT_TRUE(IsCanonicalRotation({0, 1, 0, 1}));
  EXPECT_TRUE(IsCanonicalRotation({2}));
}

TEST(Synthesis, Example2OptimalCycle) {
  const auto sys = Ex2();
  CycleSynthesis r = SynthesizeOptimalCycle(sys, 6, {CycleNorm::kOne, {Eigen::VectorXd::Constant(1, 18.2)}}, true);
  const LimitCycle printed = SolveCycle(sys, {0, 0, 1, 1, 3, 2});
  const double printed_cost = CycleCost(printed, {CycleNorm::kOne, {Eigen::VectorXd::Constant(1, 18.2)}});
  EXPECT_NEAR(r.cost, printed_cost, 1e-9);
  EXPECT_NEAR(r.cost, 0.0873539590645, 1e-9);
  // same cycle up to rotation
  bool found = false;
  for (int s = 0; s < 6 && !found; ++s) {
    bool all = true;
    for (int j = 0; j < 6; ++j) all = all && (r.cycle.StateAt(j + s) - printed.states[j]).norm() < 1e-9;
    found = all;
  }
  EXPECT_TRUE(found);
  EXPECT_GT(r.sequences_evaluated, 0);
  EXPECT_LE(r.sequences_evaluated, 4096);
}

TEST(Synthesis, ThreadCountDoesNotMatter) {
  const auto sys = Ex2();
  const CycleCostSpec spec{CycleNorm::kTwo, {Eigen::VectorXd::Constant(1, 15.0)}};
  const auto a = SynthesizeOptimalCycle(sys, 4, spec, true, 1);
  const auto b = SynthesizeOptimalCycle(sys, 4, spec, true, 3);
  EXPECT_EQ(a.cycle.input_indices, b.cycle.input_indices);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Synthesis, MatchesBruteForceWithTimeVaryingReference) {
  std::mt19937_64 rng(23);
  const auto sys = testsupport::RandomSystem(rng, 2, 3, 0.7, 0.5);
  const CycleCostSpec spec{CycleNorm::kInf, {Eigen::Vector2d(0.1, 0), Eigen::Vector2d(-0.1, 0.2)}};
  const auto r = SynthesizeOptimalCycle(sys, 4, spec, true);
  double best = 1e300;
  std::vector<int> arg;
  for (int code = 0; code < 81; ++code) {
    std::vector<int> seq;
    for (int j = 0, c = code; j < 4; ++j, c /= 3) seq.insert(seq.begin(), c % 3);
    const auto cyc = SolveCycle(sys, seq);
    bool inside = true;
    for (const auto& x : cyc.states) inside = inside && sys.state_constraints().Contains(x);
    if (!inside) continue;
    const double v = CycleCost(cyc, spec);
    if (v < best) {
      best = v;
      arg = seq;
    }
  }
  EXPECT_NEAR(r.cost, best, 1e-12);
  EXPECT_EQ(r.cycle.input_indices, arg);
}

TEST(Synthesis, BudgetAndInfeasibility) {
  const auto sys = Ex2();
  try {
    SynthesizeOptimalCycle(sys, 12, {CycleNorm::kOne, {Eigen::VectorXd::Constant(1, 18.2)}}, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetExceeded);
  }
  // every cycle of a pure contraction toward a point outside X is infeasible
  const FiniteInputSet U({Eigen::VectorXd::Zero(1)});
  Mode m{Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Constant(1, 5.0),
         Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)};
  const SwitchedAffineSystem far({m}, U, Polytope::Box(Eigen::VectorXd::Constant(1, -1), Eigen::VectorXd::Constant(1, 1)));
  try {
    SynthesizeOptimalCycle(far, 2, {CycleNorm::kOne, {Eigen::VectorXd::Zero(1)}}, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoFeasibleCycle);
  }
}
