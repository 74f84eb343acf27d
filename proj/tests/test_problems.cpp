#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "odcmd/problems.hpp"
#include "odcmd/rng.hpp"

using namespace odcmd;

TEST(RegressionStream, GradientMatchesDisplayFormula) {
  auto s = RegressionStream::generate(3, 10, 5, 42, /*lambda1=*/1.0);
  Rng rng(1);
  for (int i = 0; i < 3; ++i)
    for (long t = 1; t <= 5; ++t) {
      Vector x = rng.normal_vector(10);
      Vector b = s.feature(i, t);
      double z = s.response(i, t);
      Vector expected = (b.dot(x) - z) * b + 1.0 * x;
      EXPECT_LT((s.gradient(i, t, x) - expected).norm(), 1e-12);
    }
}

TEST(RegressionStream, ZeroDataZeroGradient) {
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(4, 3);
  Vector responses = Vector::Zero(4);
  RegressionStream s(2, 3, 2, 0.0, features, responses);
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    Vector x = rng.normal_vector(3);
    EXPECT_EQ(s.gradient(0, 1, x).norm(), 0.0);
    EXPECT_EQ(s.value(1, 2, x), 0.0);
  }
}

TEST(RegressionStream, GradientAgreesWithCentralDifferences) {
  auto s = RegressionStream::generate(2, 6, 4, 7, 0.5);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  Rng rng(3);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    int i = static_cast<int>(rng.next_u64() % 2);
    long t = 1 + static_cast<long>(rng.next_u64() % 4);
    Vector x = ball.project(rng.normal_vector(6));
    Vector g = s.gradient(i, t, x);
    for (int k = 0; k < 6; ++k) {
      Vector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      double fd = (s.value(i, t, xp) - s.value(i, t, xm)) / (2.0 * h);
      EXPECT_NEAR(g[k], fd, 1e-5);
    }
  }
}

TEST(RegressionStream, DeterministicAndStableUnderResizing) {
  auto a = RegressionStream::generate(3, 5, 10, 99, 1.0);
  auto b = RegressionStream::generate(3, 5, 10, 99, 1.0);
  EXPECT_EQ(a.feature(2, 7), b.feature(2, 7));
  EXPECT_EQ(a.response(1, 3), b.response(1, 3));

  // growing the horizon or node count must not reshuffle existing draws
  auto longer = RegressionStream::generate(3, 5, 20, 99, 1.0);
  auto wider = RegressionStream::generate(5, 5, 10, 99, 1.0);
  for (int i = 0; i < 3; ++i)
    for (long t = 1; t <= 10; ++t) {
      EXPECT_EQ(a.feature(i, t), longer.feature(i, t));
      EXPECT_EQ(a.feature(i, t), wider.feature(i, t));
      EXPECT_EQ(a.response(i, t), wider.response(i, t));
    }
}

TEST(RegressionStream, PlantedParameterShape) {
  Vector x0 = planted_parameter(10);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(x0[i], 1.0);
  for (int i = 5; i < 10; ++i) EXPECT_EQ(x0[i], 0.0);
  EXPECT_EQ(planted_parameter(7).sum(), 3.0);
}

TEST(RegressionStream, FeatureRangeAndResponseModel) {
  auto s = RegressionStream::generate(4, 8, 50, 11, 1.0);
  for (int i = 0; i < 4; ++i)
    for (long t = 1; t <= 50; ++t) {
      Vector b = s.feature(i, t);
      EXPECT_LT(b.cwiseAbs().maxCoeff(), 1.0);
    }
  // with zero noise the response is exactly <b, x0>
  auto clean = RegressionStream::generate(4, 8, 10, 11, 1.0, /*noise_sd=*/0.0);
  Vector x0 = planted_parameter(8);
  for (long t = 1; t <= 10; ++t)
    EXPECT_NEAR(clean.response(2, t), clean.feature(2, t).dot(x0), 1e-12);
}

TEST(TwoPointOracle, ZeroDeltaGivesEqualValues) {
  auto s = RegressionStream::generate(2, 4, 3, 5, 1.0);
  Rng rng(8);
  Vector x = rng.normal_vector(4);
  Vector u = rng.unit_sphere(4);
  auto [plus, minus] = s.two_point(0, 1, x, 0.0, u);
  EXPECT_EQ(plus, minus);
}

TEST(TwoPointOracle, LinearLossDifferenceIsTwoDeltaInner) {
  Vector g0(3);
  g0 << 1.0, -2.0, 0.5;
  CustomStream s(
      1, 3, 1, [&](int, long, const Vector& x) { return g0.dot(x); },
      [&](int, long, const Vector&) { return g0; }, g0.norm());
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = rng.normal_vector(3);
    Vector u = rng.unit_sphere(3);
    double delta = rng.uniform(0.01, 0.5);
    auto [plus, minus] = s.two_point(0, 1, x, delta, u);
    EXPECT_NEAR(plus - minus, 2.0 * delta * g0.dot(u), 1e-12);
  }
}

TEST(TwoPointOracle, QueryCountAudits) {
  auto s = RegressionStream::generate(3, 4, 7, 5, 1.0);
  s.reset_query_count();
  Rng rng(10);
  for (long t = 1; t <= 7; ++t)
    for (int i = 0; i < 3; ++i)
      s.two_point(i, t, rng.normal_vector(4), 0.1, rng.unit_sphere(4));
  EXPECT_EQ(s.query_count(), 2 * 3 * 7);
}

TEST(LipschitzBounds, ZeroStreamGivesZero) {
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(2, 3);
  Vector responses = Vector::Zero(2);
  RegressionStream s(1, 3, 2, 0.0, features, responses);
  auto lb = lipschitz_bounds(s, ConstraintSet::ball(1.0),
                             MirrorMap::euclidean(), Regularizer::zero());
  EXPECT_EQ(lb.g_ell, 0.0);
  EXPECT_EQ(lb.g_r, 0.0);
}

TEST(LipschitzBounds, SingleDatumClosedForm) {
  // b = (1,0), z = 0, lambda1 = 0, unit ball: G = sup |<b,x>| * ||b|| = 1
  Eigen::MatrixXd features(1, 2);
  features << 1.0, 0.0;
  Vector responses = Vector::Zero(1);
  RegressionStream s(1, 2, 1, 0.0, features, responses);
  auto lb = lipschitz_bounds(s, ConstraintSet::ball(1.0),
                             MirrorMap::euclidean(), Regularizer::zero());
  EXPECT_NEAR(lb.g_ell, 1.0, 1e-15);
}

TEST(LipschitzBounds, L1RegularizerDualNormBound) {
  auto s = RegressionStream::generate(1, 10, 1, 3, 0.0);
  auto lb = lipschitz_bounds(s, ConstraintSet::ball(1.0),
                             MirrorMap::euclidean(), Regularizer::l1(0.1));
  EXPECT_NEAR(lb.g_r, 0.1 * std::sqrt(10.0), 1e-12);
}

TEST(LipschitzBounds, UnboundedSetNeedsOverride) {
  auto s = RegressionStream::generate(1, 4, 2, 3, 1.0);
  EXPECT_THROW(lipschitz_bounds(s, ConstraintSet::free_space(),
                                MirrorMap::euclidean(), Regularizer::zero()),
               std::invalid_argument);
  auto lb = lipschitz_bounds(s, ConstraintSet::free_space(),
                             MirrorMap::euclidean(), Regularizer::zero(), 2.0);
  EXPECT_GT(lb.g_ell, 0.0);
}

TEST(LipschitzBounds, BoundDominatesObservedGradients) {
  auto s = RegressionStream::generate(4, 6, 30, 17, 1.0);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  auto lb = lipschitz_bounds(s, ball, MirrorMap::euclidean(),
                             Regularizer::l1(0.1));
  Rng rng(18);
  for (int trial = 0; trial < 2000; ++trial) {
    int i = static_cast<int>(rng.next_u64() % 4);
    long t = 1 + static_cast<long>(rng.next_u64() % 30);
    Vector x = ball.project(rng.normal_vector(6) * 2.0);
    EXPECT_LE(s.gradient(i, t, x).norm(), lb.g_ell + 1e-12);
  }
}

TEST(RegressionStream, CsvRoundTrip) {
  auto s = RegressionStream::generate(3, 4, 5, 23, 1.0);
  std::stringstream ss;
  s.export_csv(ss);
  RegressionStream back = RegressionStream::import_csv(ss, 1.0);
  EXPECT_EQ(back.nodes(), 3);
  EXPECT_EQ(back.dim(), 4);
  EXPECT_EQ(back.horizon(), 5);
  for (int i = 0; i < 3; ++i)
    for (long t = 1; t <= 5; ++t) {
      EXPECT_EQ(back.feature(i, t), s.feature(i, t));
      EXPECT_EQ(back.response(i, t), s.response(i, t));
    }
}
