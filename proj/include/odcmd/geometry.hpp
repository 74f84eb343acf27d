#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace odcmd {

using Vector = Eigen::VectorXd;

// An l_p norm together with its dual and its equivalence constants against
// the Euclidean norm: ||x|| <= pbar(d) ||x||_2 and ||x||_* <= pbar_dual(d) ||x||_2.
struct LpNorm {
  double p = 2.0;  // exponent in [1, inf)

  double value(const Vector& x) const { return lp(x, p); }
  double dual_exponent() const {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
  }
  double dual_value(const Vector& x) const { return lp(x, dual_exponent()); }

  // Tight constant in ||x||_a <= c ||x||_2, namely d^{max(0, 1/a - 1/2)}.
  static double equivalence_vs_l2(double a, int d) {
    double e = std::max(0.0, 1.0 / a - 0.5);
    return std::pow(static_cast<double>(d), e);
  }
  double pbar(int d) const { return equivalence_vs_l2(p, d); }
  double pbar_dual(int d) const {
    return equivalence_vs_l2(dual_exponent(), d);
  }

  static double lp(const Vector& x, double a) {
    if (std::isinf(a)) return x.lpNorm<Eigen::Infinity>();
    if (a == 1.0) return x.lpNorm<1>();
    if (a == 2.0) return x.norm();
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), a);
    return std::pow(s, 1.0 / a);
  }
};

enum class MapKind { kEuclidean, kEntropic, kPNorm };

// Entropic iterates are clamped to this floor before logarithms are taken;
// exponentiated updates can underflow to zero otherwise.
inline constexpr double kEntropicFloor = 1e-12;

// Distance-generating function with its link map (the gradient), inverse
// link, strong-convexity modulus and gradient-Lipschitz constant. The three
// supported generators:
//   euclidean:  w(x) = 0.5 ||x||_2^2,      1-strongly convex wrt ||.||_2
//   entropic:   w(x) = sum_i x_i ln x_i,   1-strongly convex wrt ||.||_1 on the simplex
//   pnorm:      w(x) = 0.5 ||x||_p^2,      (p-1)-strongly convex wrt ||.||_p, p in (1,2]
class MirrorMap {
 public:
  static MirrorMap euclidean() { return MirrorMap(MapKind::kEuclidean, 2.0); }
  static MirrorMap entropic() { return MirrorMap(MapKind::kEntropic, 1.0); }
  static MirrorMap pnorm(double p) {
    if (!(p > 1.0 && p <= 2.0))
      throw std::invalid_argument("pnorm mirror map requires p in (1,2], got " +
                                  std::to_string(p));
    return MirrorMap(MapKind::kPNorm, p);
  }

  MapKind kind() const { return kind_; }
  double exponent() const { return p_; }
  LpNorm norm() const {
    switch (kind_) {
      case MapKind::kEuclidean: return {2.0};
      case MapKind::kEntropic: return {1.0};
      case MapKind::kPNorm: return {p_};
    }
    return {2.0};
  }

  double sigma() const {
    switch (kind_) {
      case MapKind::kEuclidean: return 1.0;
      case MapKind::kEntropic: return 1.0;  // Pinsker, wrt ||.||_1
      case MapKind::kPNorm: return p_ - 1.0;
    }
    return 1.0;
  }

  // Gradient modulus used by bound evaluation. For the entropic map the
  // gradient is Lipschitz only on the clamped simplex (constant 1/floor);
  // for the p-norm map the gradient is Holder near the axes and 1/(p-1) is
  // a nominal constant. Both enter the bounds only through terms that
  // vanish when the prox error sequence is zero.
  double grad_lipschitz() const {
    switch (kind_) {
      case MapKind::kEuclidean: return 1.0;
      case MapKind::kEntropic: return 1.0 / kEntropicFloor;
      case MapKind::kPNorm: return 1.0 / (p_ - 1.0);
    }
    return 1.0;
  }

  double omega(const Vector& x) const {
    switch (kind_) {
      case MapKind::kEuclidean:
        return 0.5 * x.squaredNorm();
      case MapKind::kEntropic: {
        check_entropic_domain(x);
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          double xi = std::max(x[i], kEntropicFloor);
          s += xi * std::log(xi);
        }
        return s;
      }
      case MapKind::kPNorm: {
        double n = LpNorm::lp(x, p_);
        return 0.5 * n * n;
      }
    }
    return 0.0;
  }

  // The link map grad w. For the p-norm map the formula is
  // sign(x_s) |x_s|^{p-1} / ||x||_p^{p-2}; at x = 0 it is defined as 0 by
  // continuity (the expression is 0/0 there).
  Vector link(const Vector& x) const {
    switch (kind_) {
      case MapKind::kEuclidean:
        return x;
      case MapKind::kEntropic: {
        check_entropic_domain(x);
        Vector v(x.size());
        for (int i = 0; i < x.size(); ++i)
          v[i] = 1.0 + std::log(std::max(x[i], kEntropicFloor));
        return v;
      }
      case MapKind::kPNorm:
        return power_map(x, p_);
    }
    return x;
  }

  // Inverse of the link map: the gradient of the conjugate generator, which
  // for the p-norm map is the same expression with the dual exponent q.
  Vector inverse_link(const Vector& v) const {
    switch (kind_) {
      case MapKind::kEuclidean:
        return v;
      case MapKind::kEntropic: {
        Vector x(v.size());
        for (int i = 0; i < v.size(); ++i) x[i] = std::exp(v[i] - 1.0);
        return x;
      }
      case MapKind::kPNorm:
        return power_map(v, p_ / (p_ - 1.0));
    }
    return v;
  }

  // Bregman divergence V_w(x,y) = w(x) - w(y) - <grad w(y), x - y>.
  double bregman(const Vector& x, const Vector& y) const {
    if (x.size() != y.size())
      throw std::invalid_argument("bregman: dimension mismatch");
    if (kind_ == MapKind::kEntropic) {
      check_entropic_domain(x);
      check_entropic_domain(y);
      // Direct KL form, numerically gentler than the generic expansion.
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) {
        double xi = std::max(x[i], kEntropicFloor);
        double yi = std::max(y[i], kEntropicFloor);
        s += xi * std::log(xi / yi) - xi + yi;
      }
      return s;
    }
    return omega(x) - omega(y) - link(y).dot(x - y);
  }

 private:
  MirrorMap(MapKind kind, double p) : kind_(kind), p_(p) {}

  static void check_entropic_domain(const Vector& x) {
    for (int i = 0; i < x.size(); ++i)
      if (!(x[i] > 0.0))
        throw std::domain_error(
            "entropic map requires strictly positive coordinates (coordinate " +
            std::to_string(i) + " is " + std::to_string(x[i]) + ")");
  }

  // sign(x_s) |x_s|^{a-1} / ||x||_a^{a-2}, with the 0/0 case mapped to 0.
  static Vector power_map(const Vector& x, double a) {
    double n = LpNorm::lp(x, a);
    Vector v = Vector::Zero(x.size());
    if (n == 0.0) return v;
    double scale = std::pow(n, a - 2.0);
    for (int i = 0; i < x.size(); ++i) {
      double ax = std::abs(x[i]);
      v[i] = ax == 0.0 ? 0.0
                       : ((x[i] > 0 ? 1.0 : -1.0) * std::pow(ax, a - 1.0) / scale);
    }
    return v;
  }

  MapKind kind_;
  double p_;
};

}  // namespace odcmd
