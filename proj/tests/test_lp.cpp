#include <gtest/gtest.h>

#include <random>

#include "lcmpc/lp.hpp"
#include "support.hpp"

using namespace lcmpc;

namespace {

Eigen::MatrixXd SquareH() {
  Eigen::MatrixXd H(4, 2);
  H << 1, 0, -1, 0, 0, 1, 0, -1;
  return H;
}

}  // namespace

TEST(Lp, BoxCorner) {
  const Eigen::Vector4d h(1, 1, 2, 2);
  const LpSolution s = Maximize(SquareH(), h, Eigen::Vector2d(1, 1));
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.value, 3.0, 1e-12);
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_NEAR(s.x(1), 2.0, 1e-12);
}

TEST(Lp, Infeasible) {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  const LpSolution s = Maximize(A, Eigen::Vector2d(-1, -1), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(s.status, LpStatus::kInfeasible);
}

TEST(Lp, Unbounded) {
  Eigen::MatrixXd A(1, 2);
  A << 1, 0;
  const LpSolution s = Maximize(A, Eigen::VectorXd::Ones(1), Eigen::Vector2d(0, 1));
  EXPECT_EQ(s.status, LpStatus::kUnbounded);
}

TEST(Lp, ZeroObjective) {
  const LpSolution s = Maximize(SquareH(), Eigen::Vector4d(1, 1, 1, 1), Eigen::Vector2d::Zero());
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(s.value, 0.0);
  EXPECT_TRUE(((SquareH() * s.x - Eigen::Vector4d::Ones()).array() <= 1e-9).all());
}

TEST(Lp, DegenerateVertex) {
  // many constraints active at the same optimal vertex
  Eigen::MatrixXd A(6, 2);
  A << 1, 0, 0, 1, 1, 1, 2, 1, 1, 2, -1, -1;
  Eigen::VectorXd b(6);
  b << 1, 1, 2, 3, 3, 5;
  const LpSolution s = Maximize(A, b, Eigen::Vector2d(1, 1));
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.value, 2.0, 1e-12);
  EXPECT_NEAR(s.x(0), 1.0, 1e-9);
  EXPECT_NEAR(s.x(1), 1.0, 1e-9);
}

TEST(Lp, MatchesVertexEnumeration) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + trial % 9;
    Eigen::MatrixXd H(m + 4, 2);
    Eigen::VectorXd h(m + 4);
    for (int i = 0; i < m; ++i) {
      H.row(i) << N01(rng), N01(rng);
      h(i) = 0.2 + std::abs(N01(rng));
    }
    H.bottomRows(4) = SquareH();
    h.tail(4).setConstant(3.0);
    const Eigen::Vector2d c(N01(rng), N01(rng));
    const auto verts = testsupport::BruteVertices(H, h);
    ASSERT_FALSE(verts.empty());
    double best = -1e300;
    for (const auto& v : verts) best = std::max(best, c.dot(v));
    const LpSolution s = Maximize(H, h, c);
    ASSERT_EQ(s.status, LpStatus::kOptimal) << trial;
    EXPECT_NEAR(s.value, best, 1e-9) << trial;
    EXPECT_NEAR(c.dot(s.x), s.value, 1e-9);
    EXPECT_LE((H * s.x - h).maxCoeff(), 1e-9);
  }
}

TEST(Lp, ThreeDimensionalBox) {
  Eigen::MatrixXd A(6, 3);
  A << Eigen::MatrixXd::Identity(3, 3), -Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(6);
  b << 1, 2, 3, 1, 1, 1;
  const LpSolution s = Maximize(A, b, Eigen::Vector3d(1, -1, 2));
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.value, 1 + 1 + 6, 1e-12);
}

TEST(Lp, InscribedBall) {
  const ChebyshevBall b = InscribedBall(SquareH(), Eigen::Vector4d(1, 0, 1, 0));
  EXPECT_NEAR(b.radius, 0.5, 1e-12);
  EXPECT_NEAR(b.center(0), 0.5, 1e-12);
  EXPECT_NEAR(b.center(1), 0.5, 1e-12);

  const ChebyshevBall big = InscribedBall(SquareH(), Eigen::Vector4d(5, 5, 5, 5));
  EXPECT_NEAR(big.radius, 1.0, 1e-12);

  const ChebyshevBall none = InscribedBall(SquareH(), Eigen::Vector4d(-1, 0, 1, 1));
  EXPECT_LT(none.radius, 0.0);
}
