#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "odcmd/geometry.hpp"
#include "odcmd/sets.hpp"

namespace odcmd {

// Composite prox objective phi(z) = <g,z> + r(z) + V_w(z,x)/eta.
inline double prox_objective(const MirrorMap& map, const Regularizer& reg,
                             const Vector& x, const Vector& g, double eta,
                             const Vector& z) {
  return g.dot(z) + reg.value(z) + map.bregman(z, x) / eta;
}

inline double soft_threshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

inline Vector soft_threshold(const Vector& v, double tau) {
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
  return out;
}

// Strong-convexity modulus of the map wrt the Euclidean norm. For p <= 2,
// ||.||_p >= ||.||_2, so the modulus wrt ||.||_p carries over; same for the
// entropic map via ||.||_1 >= ||.||_2.
inline double sigma_l2(const MirrorMap& map) { return map.sigma(); }

// Restores a point to the feasible set in a way compatible with the map's
// domain: entropic iterates must stay strictly positive, so the simplex case
// clamps to the floor and renormalizes instead of projecting (which can
// produce exact zeros).
inline Vector domain_project(const MirrorMap& map, const ConstraintSet& set,
                             const Vector& z) {
  if (map.kind() == MapKind::kEntropic && set.kind() == SetKind::kSimplex) {
    Vector y = z.cwiseMax(kEntropicFloor * set.scale());
    return y * (set.scale() / y.sum());
  }
  return set.project(z);
}

// argmin_{x in K} w(x): the standard initializer. Closed form for the
// supported (map, set) pairs: the origin for balls (and all of R^d) under
// the euclidean/p-norm maps, the uniform vector for the simplex under the
// entropic map.
inline Vector argmin_omega(const MirrorMap& map, const ConstraintSet& set,
                           int d) {
  if (set.kind() == SetKind::kSimplex) {
    if (map.kind() == MapKind::kEntropic)
      return Vector::Constant(d, set.scale() / d);
    throw std::invalid_argument(
        "argmin of the generator over the simplex is only closed-form for the "
        "entropic map");
  }
  if (map.kind() == MapKind::kEntropic)
    throw std::invalid_argument("entropic map requires the simplex set");
  return Vector::Zero(d);
}

inline bool prox_has_closed_form(const MirrorMap& map, const ConstraintSet& set,
                                 const Regularizer& reg) {
  bool euclidean_like = map.kind() == MapKind::kEuclidean ||
                        (map.kind() == MapKind::kPNorm && map.exponent() == 2.0);
  if (euclidean_like && set.kind() == SetKind::kBall) return true;
  if (map.kind() == MapKind::kEntropic && set.kind() == SetKind::kSimplex)
    return reg.is_zero();
  if (map.kind() == MapKind::kPNorm && set.is_free())
    return reg.kind() != RegKind::kElastic;
  return false;
}

namespace detail {

// Euclidean geometry over a ball (finite or infinite radius), any of the
// three regularizers: gradient step, coordinate-wise soft-threshold at
// eta*lambda2, shrink by 1/(1+eta*lambda1), radial projection. The scaled
// soft-thresholded point stays optimal under the ball constraint because the
// constrained solution is a radial rescaling of the unconstrained one.
inline Vector prox_euclidean_ball(const ConstraintSet& set,
                                  const Regularizer& reg, const Vector& x,
                                  const Vector& g, double eta) {
  Vector v = x - eta * g;
  if (reg.lambda2() > 0.0) v = soft_threshold(v, eta * reg.lambda2());
  if (reg.kind() == RegKind::kElastic && reg.lambda1() > 0.0)
    v /= (1.0 + eta * reg.lambda1());
  return set.project(v);
}

// Entropic geometry on the simplex with no regularizer: the exponentiated
// gradient update, computed in log space for stability.
inline Vector prox_entropic_simplex(const ConstraintSet& set, const Vector& x,
                                    const Vector& g, double eta) {
  const int d = static_cast<int>(x.size());
  Vector a(d);
  for (int i = 0; i < d; ++i)
    a[i] = std::log(std::max(x[i] / set.scale(), kEntropicFloor)) - eta * g[i];
  double m = a.maxCoeff();
  Vector w(d);
  for (int i = 0; i < d; ++i) w[i] = std::exp(a[i] - m);
  Vector y = w * (set.scale() / w.sum());
  // keep iterates strictly inside the domain
  y = y.cwiseMax(kEntropicFloor * set.scale());
  return y * (set.scale() / y.sum());
}

// p-norm geometry on all of R^d with an optional l1 term: map through the
// link, gradient step, soft-threshold, map back through the inverse link.
inline Vector prox_pnorm_free(const MirrorMap& map, const Regularizer& reg,
                              const Vector& x, const Vector& g, double eta) {
  Vector v = map.link(x) - eta * g;
  if (reg.lambda2() > 0.0) v = soft_threshold(v, eta * reg.lambda2());
  return map.inverse_link(v);
}

}  // namespace detail

struct ProxNumericResult {
  Vector point;
  double objective = 0.0;
  double gap_certificate = 0.0;
  long iterations = 0;
};

class ProxNumericError : public std::runtime_error {
 public:
  ProxNumericError(const std::string& msg, double gap)
      : std::runtime_error(msg), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

ProxNumericResult prox_numeric(const MirrorMap& map, const ConstraintSet& set,
                               const Regularizer& reg, const Vector& x,
                               const Vector& g, double eta, double tol,
                               long budget = 50000);

enum class NumericFallback { kDisabled, kEnabled };

// Exact composite prox: argmin_{z in K} <g,z> + r(z) + V_w(z,x)/eta.
// Dispatches to the closed form for the supported (map, set, regularizer)
// triples; other combinations either fall back to the numeric solver or are
// rejected as a configuration error.
inline Vector prox_exact(const MirrorMap& map, const ConstraintSet& set,
                         const Regularizer& reg, const Vector& x,
                         const Vector& g, double eta,
                         NumericFallback fallback = NumericFallback::kDisabled,
                         double numeric_tol = 1e-9) {
  if (!(eta > 0.0)) throw std::invalid_argument("prox requires eta > 0");
  if (x.size() != g.size())
    throw std::invalid_argument("prox: dimension mismatch between x and g");

  bool euclidean_like = map.kind() == MapKind::kEuclidean ||
                        (map.kind() == MapKind::kPNorm && map.exponent() == 2.0);
  if (euclidean_like && set.kind() == SetKind::kBall)
    return detail::prox_euclidean_ball(set, reg, x, g, eta);
  if (map.kind() == MapKind::kEntropic && set.kind() == SetKind::kSimplex &&
      reg.is_zero())
    return detail::prox_entropic_simplex(set, x, g, eta);
  if (map.kind() == MapKind::kPNorm && set.is_free() &&
      reg.kind() != RegKind::kElastic)
    return detail::prox_pnorm_free(map, reg, x, g, eta);

  if (fallback == NumericFallback::kEnabled)
    return prox_numeric(map, set, reg, x, g, eta, numeric_tol).point;
  throw std::invalid_argument(
      "no closed-form prox for this (map, set, regularizer) combination and "
      "numeric fallback is disabled");
}

namespace detail {

// Certified optimality gap at z: with s the minimal-norm element of
// grad(smooth) + lambda2 d||.||_1 + N_K found coordinate-wise, strong
// convexity of the objective (modulus sigma/eta wrt ||.||_2) gives
// phi(z) - phi* <= ||s||^2 eta / (2 sigma).
inline double certified_gap(const MirrorMap& map, const ConstraintSet& set,
                            const Regularizer& reg, const Vector& x,
                            const Vector& link_x, const Vector& g, double eta,
                            const Vector& z) {
  const int d = static_cast<int>(z.size());
  Vector r = g + (map.link(z) - link_x) / eta;
  if (reg.kind() == RegKind::kElastic) r += reg.lambda1() * z;
  if (reg.lambda2() > 0.0) {
    for (int i = 0; i < d; ++i) {
      if (z[i] != 0.0)
        r[i] += reg.lambda2() * (z[i] > 0.0 ? 1.0 : -1.0);
      else
        r[i] = soft_threshold(r[i], reg.lambda2());  // best subgradient at 0
    }
  }
  // remove the normal-cone component
  switch (set.kind()) {
    case SetKind::kBall: {
      if (!set.is_free()) {
        double radius = set.radius();
        double n = z.norm();
        if (n >= radius * (1.0 - 1e-12) && n > 0.0) {
          double tau = std::max(0.0, -r.dot(z) / (n * n));
          r += tau * z;
        }
      }
      break;
    }
    case SetKind::kSimplex: {
      // normal cone = { c*1 - mu : mu >= 0 supported on zero coords };
      // minimize ||r + c*1 - mu|| over c by bisection on the derivative.
      auto deriv = [&](double c) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double v = r[i] + c;
          if (z[i] == 0.0 && v >= 0.0) continue;  // absorbed by mu
          s += v;
        }
        return s;
      };
      double lo = -r.cwiseAbs().maxCoeff() - 1.0;
      double hi = r.cwiseAbs().maxCoeff() + 1.0;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? hi : lo) = mid;
      }
      double c = 0.5 * (lo + hi);
      for (int i = 0; i < d; ++i) {
        double v = r[i] + c;
        r[i] = (z[i] == 0.0 && v >= 0.0) ? 0.0 : v;
      }
      break;
    }
  }
  return r.squaredNorm() * eta / (2.0 * sigma_l2(map));
}

// Projection onto set /\ orthant(sign) /\ {z_i = 0 for sign_i = 0}. The
// orthant is a convex cone, so for the ball the composition clamp-then-scale
// is the exact projection onto the intersection.
inline Vector project_face(const ConstraintSet& set,
                           const Eigen::VectorXi& sign, const Vector& z) {
  const int d = static_cast<int>(z.size());
  Vector w(d);
  for (int i = 0; i < d; ++i) {
    if (sign[i] == 0)
      w[i] = 0.0;
    else if (sign[i] > 0)
      w[i] = std::max(z[i], 0.0);
    else
      w[i] = std::min(z[i], 0.0);
  }
  return set.project(w);
}

// Smooth polish on the face identified by the sign pattern of z0: with the
// signs frozen the l1 term is linear, so projected gradient descent with a
// halving line search converges fast. Zero regularizer skips the sign
// restriction entirely.
inline Vector polish_on_face(const MirrorMap& map, const ConstraintSet& set,
                             const Regularizer& reg, const Vector& x,
                             const Vector& link_x, const Vector& g, double eta,
                             const Vector& z0, int max_iter = 2000) {
  const int d = static_cast<int>(z0.size());
  // the sign restriction interacts badly with the simplex sum constraint,
  // and on the simplex the l1 term is constant anyway
  const bool restrict_signs =
      reg.lambda2() > 0.0 && set.kind() != SetKind::kSimplex;
  Eigen::VectorXi sign(d);
  for (int i = 0; i < d; ++i)
    sign[i] = z0[i] > 0.0 ? 1 : (z0[i] < 0.0 ? -1 : 0);

  auto project = [&](const Vector& v) {
    return restrict_signs ? project_face(set, sign, v)
                          : domain_project(map, set, v);
  };
  auto objective = [&](const Vector& v) {
    return prox_objective(map, reg, x, g, eta, v);
  };

  Vector z = project(z0);
  double fz = objective(z);
  double step = eta / sigma_l2(map);
  for (int k = 0; k < max_iter; ++k) {
    Vector grad = g + (map.link(z) - link_x) / eta;
    if (reg.kind() == RegKind::kElastic) grad += reg.lambda1() * z;
    if (restrict_signs)
      for (int i = 0; i < d; ++i)
        if (sign[i] != 0) grad[i] += reg.lambda2() * sign[i];
    bool moved = false;
    double s = step;
    for (int ls = 0; ls < 40; ++ls) {
      Vector zn = project(z - s * grad);
      double fn = objective(zn);
      if (std::isfinite(fn) && fn < fz - 1e-18 * std::abs(fz)) {
        if ((zn - z).norm() < 1e-15 * (1.0 + z.norm())) {
          z = zn;
          fz = fn;
          return z;
        }
        z = zn;
        fz = fn;
        moved = true;
        step = s * 2.0;
        break;
      }
      s *= 0.5;
    }
    if (!moved) break;
  }
  return z;
}

// Two-stage grid refinement for d <= 2: a coarse pass over the feasible box
// followed by a local pass around the coarse argmin.
inline Vector grid_refine(const MirrorMap& map, const ConstraintSet& set,
                          const Regularizer& reg, const Vector& x,
                          const Vector& g, double eta, const Vector& center) {
  const int d = static_cast<int>(x.size());
  auto objective = [&](const Vector& v) {
    return prox_objective(map, reg, x, g, eta, v);
  };
  auto scan = [&](const Vector& c, double halfwidth, double step) {
    Vector best = domain_project(map, set, c);
    double fbest = objective(best);
    if (d == 1) {
      for (double a = -halfwidth; a <= halfwidth; a += step) {
        Vector v(1);
        v[0] = c[0] + a;
        v = domain_project(map, set, v);
        double f = objective(v);
        if (f < fbest) {
          fbest = f;
          best = v;
        }
      }
    } else {
      for (double a = -halfwidth; a <= halfwidth; a += step)
        for (double b = -halfwidth; b <= halfwidth; b += step) {
          Vector v(2);
          v[0] = c[0] + a;
          v[1] = c[1] + b;
          v = domain_project(map, set, v);
          double f = objective(v);
          if (f < fbest) {
            fbest = f;
            best = v;
          }
        }
    }
    return best;
  };
  double width = set.is_free() ? std::max(1.0, 2.0 * (center - x).norm() + 1.0)
                               : set.radius() + 0.01;
  double coarse = std::max(1e-2, 2.0 * width / 400.0);
  Vector c1 = scan(center, width, coarse);
  return scan(c1, 2.0 * coarse, 1e-4);
}

}  // namespace detail

// Numeric composite prox: projected subgradient descent with the
// strongly-convex 1/k step schedule, interleaved with a smooth polish on the
// identified face, until the certified optimality gap drops below tol.
// Instances with d <= 2 additionally cross-check against two-stage grid
// refinement. Throws ProxNumericError carrying the final certified gap if
// the budget runs out first.
inline ProxNumericResult prox_numeric(const MirrorMap& map,
                                      const ConstraintSet& set,
                                      const Regularizer& reg, const Vector& x,
                                      const Vector& g, double eta, double tol,
                                      long budget) {
  if (!(eta > 0.0)) throw std::invalid_argument("prox requires eta > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("prox_numeric requires tol > 0");
  const int d = static_cast<int>(x.size());
  const Vector link_x = map.link(x);
  auto objective = [&](const Vector& v) {
    return prox_objective(map, reg, x, g, eta, v);
  };

  Vector z = domain_project(map, set, x - eta * g);
  Vector best = z;
  double fbest = objective(z);
  const double mu = sigma_l2(map) / eta;

  long k = 0;
  bool grid_done = false;
  double cert = std::numeric_limits<double>::infinity();
  while (k < budget) {
    long chunk = std::min<long>(2000, budget - k);
    for (long j = 0; j < chunk; ++j) {
      ++k;
      Vector s = g + reg.subgradient(z) + (map.link(z) - link_x) / eta;
      double alpha = 2.0 / (mu * static_cast<double>(k + 1));
      z = domain_project(map, set, z - alpha * s);
      double f = objective(z);
      if (!std::isfinite(f)) {
        z = best;
        continue;
      }
      if (f < fbest) {
        fbest = f;
        best = z;
      }
    }
    if (!grid_done && d <= 2) {
      grid_done = true;
      Vector zg = detail::grid_refine(map, set, reg, x, g, eta, best);
      double fg = objective(zg);
      if (fg < fbest) {
        fbest = fg;
        best = zg;
      }
    }
    Vector zp = detail::polish_on_face(map, set, reg, x, link_x, g, eta, best);
    double fp = objective(zp);
    if (fp < fbest) {
      fbest = fp;
      best = zp;
    }
    cert = detail::certified_gap(map, set, reg, x, link_x, g, eta, best);
    if (cert <= tol)
      return ProxNumericResult{best, fbest, cert, k};
  }
  throw ProxNumericError(
      "prox_numeric did not reach tolerance " + std::to_string(tol) + " within " +
          std::to_string(budget) + " iterations (certified gap " +
          std::to_string(cert) + ")",
      cert);
}

// Optimization-error injection for the approximate prox step.
enum class ErrorModelKind {
  kExact,    // no error: y = y*
  kPerturb,  // y = y* + rho_t * 1 with rho_t = c_rho / t^{3/2}, reprojected
  kFixed,    // same with constant rho_t = rho
  kCapped,   // perturbation scaled back until the objective gap is <= rho_t
};

struct ErrorModel {
  ErrorModelKind kind = ErrorModelKind::kExact;
  double c_rho = 0.0;
  double rho = 0.0;

  static ErrorModel exact() { return {}; }
  static ErrorModel perturb(double c_rho) {
    return {ErrorModelKind::kPerturb, c_rho, 0.0};
  }
  static ErrorModel fixed(double rho) {
    return {ErrorModelKind::kFixed, 0.0, rho};
  }
  static ErrorModel capped(double c_rho) {
    return {ErrorModelKind::kCapped, c_rho, 0.0};
  }

  double rho_at(long t) const {
    switch (kind) {
      case ErrorModelKind::kExact:
        return 0.0;
      case ErrorModelKind::kPerturb:
        return c_rho / std::pow(static_cast<double>(t), 1.5);
      case ErrorModelKind::kFixed:
        return rho;
      case ErrorModelKind::kCapped:
        return rho > 0.0 ? rho
                         : c_rho / std::pow(static_cast<double>(t), 1.5);
    }
    return 0.0;
  }
};

struct ProxApproxResult {
  Vector point;        // y_{i,t}, feasible
  Vector exact_point;  // y*_{i,t}
  double realized_gap = 0.0;
  double rho = 0.0;
};

// rho_t-approximate prox: computes the exact minimizer, applies the
// configured perturbation along the all-ones direction, and reprojects so
// the returned point stays feasible. The realized composite-objective gap
// against the exact solution is reported for auditing.
inline ProxApproxResult prox_approx(
    const MirrorMap& map, const ConstraintSet& set, const Regularizer& reg,
    const Vector& x, const Vector& g, double eta, const ErrorModel& model,
    long t, NumericFallback fallback = NumericFallback::kDisabled) {
  if (t < 1) throw std::invalid_argument("round index must be >= 1");
  Vector ystar = prox_exact(map, set, reg, x, g, eta, fallback);
  if (model.kind == ErrorModelKind::kExact)
    return ProxApproxResult{ystar, ystar, 0.0, 0.0};

  const double rho = model.rho_at(t);
  const Vector ones = Vector::Ones(x.size());
  double fstar = prox_objective(map, reg, x, g, eta, ystar);
  auto perturbed = [&](double scale) {
    return domain_project(map, set, ystar + scale * rho * ones);
  };
  auto gap_of = [&](const Vector& y) {
    return prox_objective(map, reg, x, g, eta, y) - fstar;
  };

  if (model.kind != ErrorModelKind::kCapped) {
    Vector y = perturbed(1.0);
    return ProxApproxResult{y, ystar, gap_of(y), rho};
  }

  // capped: largest perturbation scale in [0,1] whose realized gap is <= rho
  Vector y = perturbed(1.0);
  double gap = gap_of(y);
  if (gap > rho) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (gap_of(perturbed(mid)) <= rho)
        lo = mid;
      else
        hi = mid;
    }
    y = perturbed(lo);
    gap = gap_of(y);
  }
  return ProxApproxResult{y, ystar, gap, rho};
}

}  // namespace odcmd
