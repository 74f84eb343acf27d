#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "odcmd/geometry.hpp"

namespace odcmd {

enum class SetKind { kBall, kSimplex };

// Convex feasible set: a Euclidean ball ||x||_2 <= R (R may be infinite,
// giving all of R^d), the probability simplex, or a shrunk copy (1-xi)K of
// either. Shrinking composes through a scale factor, so
// shrunk(K, xi).contains(x) iff K.contains(x / (1-xi)).
class ConstraintSet {
 public:
  static ConstraintSet ball(double radius) {
    if (!(radius > 0.0))
      throw std::invalid_argument("ball radius must be positive");
    return ConstraintSet(SetKind::kBall, radius, radius, 1.0);
  }
  static ConstraintSet ball(double radius, double inner_radius) {
    if (!(radius > 0.0) || !(inner_radius > 0.0) || inner_radius > radius)
      throw std::invalid_argument("ball radii must satisfy 0 < R_lower <= R_upper");
    return ConstraintSet(SetKind::kBall, radius, inner_radius, 1.0);
  }
  static ConstraintSet free_space() {
    return ball(std::numeric_limits<double>::infinity());
  }
  static ConstraintSet simplex() {
    return ConstraintSet(SetKind::kSimplex, 1.0, 0.0, 1.0);
  }

  ConstraintSet shrunk(double xi) const {
    if (!(xi >= 0.0 && xi < 1.0))
      throw std::invalid_argument("shrinkage factor must lie in [0,1)");
    if (is_free() && xi > 0.0)
      throw std::invalid_argument("cannot shrink an unbounded set");
    ConstraintSet s = *this;
    s.scale_ *= (1.0 - xi);
    return s;
  }

  SetKind kind() const { return kind_; }
  bool is_free() const {
    return kind_ == SetKind::kBall && std::isinf(radius_);
  }
  double scale() const { return scale_; }

  // Outer Euclidean radius R_upper of the (possibly shrunk) set.
  double radius() const {
    if (kind_ == SetKind::kSimplex) return scale_;  // vertices have norm scale
    return scale_ * radius_;
  }

  // Radius of the largest origin-centered Euclidean ball inside the set
  // (Assumption on bandit feasibility); zero for the simplex.
  double inner_radius() const {
    if (kind_ == SetKind::kSimplex) return 0.0;
    return scale_ * inner_radius_;
  }

  bool contains(const Vector& x, double tol = 1e-9) const {
    switch (kind_) {
      case SetKind::kBall:
        return is_free() || x.norm() <= scale_ * radius_ + tol;
      case SetKind::kSimplex: {
        double sum = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          if (x[i] < -tol) return false;
          sum += x[i];
        }
        return std::abs(sum - scale_) <= tol * std::max(1.0, scale_);
      }
    }
    return false;
  }

  // Exact Euclidean projection onto the set.
  Vector project(const Vector& x) const {
    switch (kind_) {
      case SetKind::kBall: {
        if (is_free()) return x;
        double r = scale_ * radius_;
        double n = x.norm();
        return n <= r ? x : Vector(x * (r / n));
      }
      case SetKind::kSimplex:
        return scale_ * project_unit_simplex(x / scale_);
    }
    return x;
  }

  // Diameter of the set under the given norm. For the ball the extreme pair
  // realizes the norm-equivalence constant against ||.||_2.
  double diameter(const LpNorm& norm, int d) const {
    switch (kind_) {
      case SetKind::kBall:
        if (is_free()) return std::numeric_limits<double>::infinity();
        return 2.0 * scale_ * radius_ * norm.pbar(d);
      case SetKind::kSimplex:
        // distance between two vertices: ||e_i - e_j||_p = 2^{1/p}
        return scale_ * std::pow(2.0, 1.0 / norm.p);
    }
    return 0.0;
  }

 private:
  ConstraintSet(SetKind kind, double radius, double inner, double scale)
      : kind_(kind), radius_(radius), inner_radius_(inner), scale_(scale) {}

  // Euclidean projection onto the unit simplex (sort-and-threshold).
  static Vector project_unit_simplex(const Vector& x) {
    const int d = static_cast<int>(x.size());
    std::vector<double> u(x.data(), x.data() + d);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    int rho = 0;
    for (int j = 0; j < d; ++j) {
      cumsum += u[j];
      double t = (cumsum - 1.0) / (j + 1);
      if (u[j] - t > 0.0) {
        rho = j + 1;
        theta = t;
      }
    }
    (void)rho;
    Vector y(d);
    for (int i = 0; i < d; ++i) y[i] = std::max(x[i] - theta, 0.0);
    return y;
  }

  SetKind kind_;
  double radius_;        // base outer radius (ball)
  double inner_radius_;  // base inner radius (ball)
  double scale_;         // cumulative (1 - xi) shrink factor
};

enum class RegKind { kZero, kL1, kElastic };

// The fixed composite term r(x): zero, an l1 penalty, or an elastic-net
// penalty lambda2 ||x||_1 + (lambda1/2) ||x||_2^2.
class Regularizer {
 public:
  static Regularizer zero() { return Regularizer(RegKind::kZero, 0.0, 0.0); }
  static Regularizer l1(double lambda2) {
    return Regularizer(RegKind::kL1, 0.0, lambda2);
  }
  static Regularizer elastic(double lambda1, double lambda2) {
    return Regularizer(RegKind::kElastic, lambda1, lambda2);
  }

  RegKind kind() const { return kind_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  bool is_zero() const { return kind_ == RegKind::kZero; }

  double value(const Vector& x) const {
    switch (kind_) {
      case RegKind::kZero: return 0.0;
      case RegKind::kL1: return lambda2_ * x.lpNorm<1>();
      case RegKind::kElastic:
        return lambda2_ * x.lpNorm<1>() + 0.5 * lambda1_ * x.squaredNorm();
    }
    return 0.0;
  }

  // A subgradient; `tie` in [-1,1] selects the l1 subgradient at zero
  // coordinates (0 makes soft-thresholding canonical).
  Vector subgradient(const Vector& x, double tie = 0.0) const {
    Vector g = Vector::Zero(x.size());
    if (kind_ == RegKind::kZero) return g;
    for (int i = 0; i < x.size(); ++i)
      g[i] = lambda2_ * (x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : tie));
    if (kind_ == RegKind::kElastic) g += lambda1_ * x;
    return g;
  }

  // Lipschitz constant G_r of r over the set, wrt the given norm:
  // the l1 subgradient is bounded by lambda2 d^{1/q} in the dual norm and
  // the quadratic term contributes lambda1 sup_K ||x||_q.
  double lipschitz(const LpNorm& norm, const ConstraintSet& set, int d) const {
    if (kind_ == RegKind::kZero) return 0.0;
    double q = norm.dual_exponent();
    double dq = std::isinf(q) ? 1.0 : std::pow(static_cast<double>(d), 1.0 / q);
    double g = lambda2_ * dq;
    if (kind_ == RegKind::kElastic && lambda1_ > 0.0) {
      if (set.is_free())
        throw std::invalid_argument(
            "elastic regularizer has no Lipschitz bound on an unbounded set");
      g += lambda1_ * set.radius() * LpNorm::equivalence_vs_l2(q, d);
    }
    return g;
  }

 private:
  Regularizer(RegKind kind, double l1w, double l2w)
      : kind_(kind), lambda1_(l1w), lambda2_(l2w) {}

  RegKind kind_;
  double lambda1_;
  double lambda2_;
};

}  // namespace odcmd
