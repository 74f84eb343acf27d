#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>

#include "odcmd/harness.hpp"

using namespace odcmd;

namespace {

// brute-force minimizer of the aggregated composite objective over the ball,
// by two-stage grid refinement (d <= 3)
Vector grid_comparator(const LossStream& stream, const ConstraintSet& set,
                       const Regularizer& reg) {
  const int d = stream.dim();
  const double weight = stream.nodes() * static_cast<double>(stream.horizon());
  auto objective = [&](const Vector& x) {
    return stream.sum_value(x) + weight * reg.value(x);
  };
  Vector best = Vector::Zero(d);
  double fbest = objective(best);
  auto scan = [&](const Vector& center, double halfwidth, double step) {
    Vector idx = Vector::Zero(d);
    std::function<void(int, Vector&)> rec = [&](int k, Vector& point) {
      if (k == d) {
        Vector p = set.project(point);
        double f = objective(p);
        if (f < fbest) {
          fbest = f;
          best = p;
        }
        return;
      }
      for (double a = -halfwidth; a <= halfwidth; a += step) {
        point[k] = center[k] + a;
        rec(k + 1, point);
      }
    };
    Vector point(d);
    rec(0, point);
  };
  scan(Vector::Zero(d), set.radius(), set.radius() / 25.0);
  Vector c1 = best;
  scan(c1, set.radius() / 10.0, set.radius() / 500.0);
  Vector c2 = best;
  scan(c2, set.radius() / 200.0, set.radius() / 20000.0);
  return best;
}

}  // namespace

TEST(Comparator, SingleDatumLeastSquaresOnBall) {
  // one datum b = (1,0), z = 1, no regularization: x* = b attains zero loss
  Eigen::MatrixXd features(1, 2);
  features << 1.0, 0.0;
  Vector responses(1);
  responses << 1.0;
  RegressionStream stream(1, 2, 1, 0.0, features, responses);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  ComparatorResult r = solve_comparator(stream, ball, Regularizer::zero());
  EXPECT_NEAR(r.x_star[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x_star[1], 0.0, 1e-6);
  EXPECT_LE(r.gap_certificate, 1e-9 * std::max(1.0, std::abs(r.objective)));

  Vector grid = grid_comparator(stream, ball, Regularizer::zero());
  EXPECT_LT((r.x_star - grid).norm(), 1e-3);
}

TEST(Comparator, HugeL1WeightForcesZero) {
  auto stream = RegressionStream::generate(2, 3, 4, 3, 0.0);
  // weight * lambda2 above ||sum gradient at 0||_inf forces the origin
  double lam2 = 1e3;
  ComparatorResult r = solve_comparator(stream, ConstraintSet::ball(1.0),
                                        Regularizer::l1(lam2));
  EXPECT_LT(r.x_star.norm(), 1e-9);
}

TEST(Comparator, MatchesGridOracleOnRandomSmallInstance) {
  auto stream = RegressionStream::generate(2, 3, 5, 17, 1.0);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  Regularizer reg = Regularizer::l1(0.1);
  ComparatorResult r = solve_comparator(stream, ball, reg);
  Vector grid = grid_comparator(stream, ball, reg);
  const double weight = 2 * 5;
  double f_solver = stream.sum_value(r.x_star) + weight * reg.value(r.x_star);
  double f_grid = stream.sum_value(grid) + weight * reg.value(grid);
  EXPECT_LE(f_solver, f_grid + 1e-4);
  EXPECT_LT((r.x_star - grid).norm(), 1e-2);
}

TEST(Comparator, UnconstrainedStronglyConvexSolve) {
  auto stream = RegressionStream::generate(3, 4, 6, 23, 1.0);
  ComparatorResult r = solve_comparator(stream, ConstraintSet::free_space(),
                                        Regularizer::l1(0.1));
  // first-order check: 0 in sum_grad + weight * lambda2 * sign at x*
  Vector g = stream.sum_gradient(r.x_star);
  const double tau = 3 * 6 * 0.1;
  for (int s = 0; s < 4; ++s) {
    if (std::abs(r.x_star[s]) > 1e-9)
      EXPECT_NEAR(g[s] + tau * (r.x_star[s] > 0 ? 1.0 : -1.0), 0.0, 1e-4);
    else
      EXPECT_LE(std::abs(g[s]), tau + 1e-6);
  }
}

TEST(Comparator, BudgetExhaustionCarriesGap) {
  auto stream = RegressionStream::generate(2, 3, 4, 29, 1.0);
  EXPECT_THROW(solve_comparator(stream, ConstraintSet::ball(1.0),
                                Regularizer::l1(0.1), 1e-16, /*budget=*/3),
               ComparatorError);
}

TEST(Regret, FrozenAtComparatorGivesZero) {
  auto stream = RegressionStream::generate(2, 3, 4, 31, 1.0);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  Regularizer reg = Regularizer::l1(0.1);
  ComparatorResult comp = solve_comparator(stream, ball, reg);

  RunRecord rec;
  rec.m = 2;
  rec.d = 3;
  rec.horizon = 4;
  rec.rounds.resize(4);
  rec.network_loss.resize(4, 2);
  for (long t = 1; t <= 4; ++t) {
    double c = 0.0;
    for (int j = 0; j < 2; ++j) c += stream.value(j, t, comp.x_star);
    c += 2 * reg.value(comp.x_star);
    rec.network_loss.row(t - 1).setConstant(c);
  }
  RegretReport rep = average_regret(rec, stream, reg, comp);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(rep.per_node[i], 0.0, 1e-10);
  EXPECT_GE(rep.max, rep.min);
}

TEST(Regret, SingleNodeSingleRoundCollapse) {
  Eigen::MatrixXd features(1, 2);
  features << 0.5, 0.5;
  Vector responses(1);
  responses << 2.0;
  RegressionStream stream(1, 2, 1, 0.0, features, responses);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  ComparatorResult comp = solve_comparator(stream, ball, Regularizer::zero());

  Vector x11 = Vector::Zero(2);
  RunRecord rec;
  rec.m = 1;
  rec.d = 2;
  rec.horizon = 1;
  rec.rounds.resize(1);
  rec.network_loss.resize(1, 1);
  rec.network_loss(0, 0) = stream.value(0, 1, x11);
  RegretReport rep = average_regret(rec, stream, Regularizer::zero(), comp);
  EXPECT_NEAR(rep.per_node[0],
              stream.value(0, 1, x11) - stream.value(0, 1, comp.x_star), 1e-9);
}

TEST(Regret, DimensionMismatchRejected) {
  auto stream = RegressionStream::generate(1, 3, 2, 5, 1.0);
  RunRecord rec;
  rec.m = 1;
  rec.d = 3;
  rec.horizon = 2;
  rec.network_loss.resize(2, 1);
  ComparatorResult comp;
  comp.x_star = Vector::Zero(4);
  EXPECT_THROW(average_regret(rec, stream, Regularizer::zero(), comp),
               std::invalid_argument);
}

TEST(Regret, NeverMeaningfullyNegative) {
  auto stream = RegressionStream::generate(4, 5, 50, 37, 1.0);
  NetworkSchedule net = NetworkSchedule::ring(4);
  ConstraintSet ball = ConstraintSet::ball(1.0);
  Regularizer reg = Regularizer::l1(0.1);
  AlgorithmConfig cfg;
  cfg.eta = 1.0 / std::sqrt(50.0);
  cfg.error = ErrorModel::exact();
  RunRecord rec =
      run_odcmd(stream, net, MirrorMap::euclidean(), ball, reg, cfg, 50);
  ComparatorResult comp = solve_comparator(stream, ball, reg);
  RegretReport rep = average_regret(rec, stream, reg, comp);
  for (int i = 0; i < 4; ++i)
    EXPECT_GE(rep.per_node[i], -comp.gap_certificate * 4);
}

TEST(Disagreement, SingleNodeIsZero) {
  auto stream = RegressionStream::generate(1, 3, 10, 41, 1.0);
  NetworkSchedule net = NetworkSchedule::ring(1);
  AlgorithmConfig cfg;
  cfg.eta = 0.1;
  RunRecord rec = run_odcmd(stream, net, MirrorMap::euclidean(),
                            ConstraintSet::ball(1.0), Regularizer::l1(0.1),
                            cfg, 10);
  for (double v : disagreement_curve(rec)) EXPECT_EQ(v, 0.0);
}

TEST(Disagreement, CumulativeBoundedByLemma2c) {
  auto stream = RegressionStream::generate(6, 5, 80, 43, 1.0);
  NetworkSchedule net = NetworkSchedule::alternating_halves(
      6, NetworkSchedule::erdos_renyi_connected(6, 0.5, 43), 43);
  AlgorithmConfig cfg;
  cfg.eta = 1.0 / (5.0 * std::sqrt(80.0));
  cfg.error = ErrorModel::perturb(10.0);
  RunRecord rec = run_odcmd(stream, net, MirrorMap::euclidean(),
                            ConstraintSet::ball(1.0), Regularizer::l1(0.1),
                            cfg, 80);
  double cumulative = 0.0;
  for (double v : disagreement_curve(rec)) cumulative += v;
  EXPECT_LE(cumulative, lemma2c_bound(rec, rec.g_ell));
}
