#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "odcmd/algorithms.hpp"
#include "odcmd/problems.hpp"
#include "odcmd/prox.hpp"
#include "odcmd/sets.hpp"

namespace odcmd {

struct ComparatorResult {
  Vector x_star;
  double objective = 0.0;
  double gap_certificate = 0.0;
  long iterations = 0;
};

class ComparatorError : public std::runtime_error {
 public:
  ComparatorError(const std::string& msg, double gap)
      : std::runtime_error(msg), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

// Offline comparator x* = argmin_{x in K} sum_t sum_j ( l_{j,t}(x) + r(x) ),
// solved by accelerated proximal gradient (backtracking FISTA with restarts)
// on the aggregated smooth part. The returned certificate bounds the
// objective gap: with mu > 0 strong convexity it is ||g_L||^2 / (2 mu) for
// the prox-gradient mapping g_L, otherwise ||g_L|| times the Euclidean
// diameter of the set.
inline ComparatorResult solve_comparator(const LossStream& stream,
                                         const ConstraintSet& set,
                                         const Regularizer& reg,
                                         double tol_rel = 1e-9,
                                         long budget = 200000) {
  const int d = stream.dim();
  const double weight = static_cast<double>(stream.nodes()) *
                        static_cast<double>(stream.horizon());
  const bool l1_active =
      reg.lambda2() > 0.0 && set.kind() != SetKind::kSimplex;
  const double lam1 = reg.kind() == RegKind::kElastic ? reg.lambda1() : 0.0;

  auto smooth_value = [&](const Vector& x) {
    double v = stream.sum_value(x);
    if (lam1 > 0.0) v += 0.5 * weight * lam1 * x.squaredNorm();
    return v;
  };
  auto smooth_grad = [&](const Vector& x) {
    Vector g = stream.sum_gradient(x);
    if (lam1 > 0.0) g += weight * lam1 * x;
    return g;
  };
  auto total_value = [&](const Vector& x) {
    return stream.sum_value(x) + weight * reg.value(x);
  };
  // prox of (weight * lambda2 ||.||_1)/L plus the set indicator
  auto prox_step = [&](const Vector& v, double inv_l) {
    Vector w = v;
    if (l1_active) w = soft_threshold(w, inv_l * weight * reg.lambda2());
    if (lam1 > 0.0) w /= (1.0 + inv_l * weight * lam1);
    return set.project(w);
  };

  const double mu = stream.sum_strong_convexity() + weight * lam1;
  Vector x = set.project(Vector::Zero(d));
  Vector y = x;
  double theta_m = 1.0;
  double lips = 1.0;
  double fx = total_value(x);
  double best_cert = std::numeric_limits<double>::infinity();

  for (long k = 1; k <= budget; ++k) {
    Vector gy = smooth_grad(y);
    double fy = smooth_value(y);
    Vector xn;
    for (int bt = 0; bt < 200; ++bt) {
      xn = prox_step(y - gy / lips, 1.0 / lips);
      Vector diff = xn - y;
      if (smooth_value(xn) <=
          fy + gy.dot(diff) + 0.5 * lips * diff.squaredNorm() + 1e-12 * std::abs(fy))
        break;
      lips *= 2.0;
    }
    double fn = total_value(xn);
    if (fn > fx) {  // restart the momentum
      y = x;
      theta_m = 1.0;
      continue;
    }
    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta_m * theta_m));
    y = xn + ((theta_m - 1.0) / theta_next) * (xn - x);
    x = xn;
    fx = fn;
    theta_m = theta_next;

    if (k % 10 == 0 || k == budget) {
      Vector gx = smooth_grad(x);
      Vector xp = prox_step(x - gx / lips, 1.0 / lips);
      double gmap = lips * (x - xp).norm();
      double cert;
      if (mu > 0.0)
        cert = gmap * gmap / (2.0 * mu);
      else if (!set.is_free())
        cert = gmap * 2.0 * set.radius();
      else
        cert = std::numeric_limits<double>::infinity();
      best_cert = std::min(best_cert, cert);
      double fp = total_value(xp);
      double scale = std::max(1.0, std::abs(fp));
      if (cert <= tol_rel * scale)
        return ComparatorResult{xp, fp, cert, k};
    }
  }
  throw ComparatorError("comparator solve exhausted its budget (best gap " +
                            std::to_string(best_cert) + ")",
                        best_cert);
}

struct RegretReport {
  Vector per_node;  // average regularized regret of each node
  double max = 0.0;
  double min = 0.0;
  Vector x_star;
  double comparator_objective = 0.0;
  double comparator_gap = 0.0;
  std::vector<double> disagreement;  // per-round sum_i ||x_i - xbar||
};

// Exact evaluation of the average regularized regret of every node against
// a certified comparator, plus the max/min aggregation.
inline RegretReport average_regret(const RunRecord& rec,
                                   const LossStream& stream,
                                   const Regularizer& reg,
                                   const ComparatorResult& comparator) {
  if (comparator.x_star.size() != rec.d)
    throw std::invalid_argument("comparator dimension does not match the run");
  if (rec.network_loss.rows() != rec.horizon || rec.m != stream.nodes())
    throw std::invalid_argument("run record is incomplete");
  const double comparator_total =
      stream.sum_value(comparator.x_star) +
      static_cast<double>(stream.nodes()) *
          static_cast<double>(stream.horizon()) *
          reg.value(comparator.x_star);

  RegretReport rep;
  rep.x_star = comparator.x_star;
  rep.comparator_objective = comparator.objective;
  rep.comparator_gap = comparator.gap_certificate;
  rep.per_node =
      (rec.network_loss.colwise().sum().array() - comparator_total) /
      static_cast<double>(rec.horizon);
  rep.max = rep.per_node.maxCoeff();
  rep.min = rep.per_node.minCoeff();
  rep.disagreement.reserve(rec.rounds.size());
  for (const auto& rm : rec.rounds) rep.disagreement.push_back(rm.disagreement);
  return rep;
}

inline std::vector<double> disagreement_curve(const RunRecord& rec) {
  std::vector<double> out;
  out.reserve(rec.rounds.size());
  for (const auto& rm : rec.rounds) out.push_back(rm.disagreement);
  return out;
}

// Per-round deviation bounds from the approximate prox step:
// ||y - y*|| <= sqrt(2 eta rho_t / sigma) once the objective gap is <= rho_t,
// and ||y* - x|| <= (G + G_r) eta / sigma.
inline double lemma2a_bound(double eta, double rho, double sigma) {
  return std::sqrt(2.0 * eta * rho / sigma);
}
inline double lemma2b_bound(double grad_bound, double g_r, double eta,
                            double sigma) {
  return (grad_bound + g_r) * eta / sigma;
}

// Cumulative disagreement bound sum_t sum_i ||x_{i,t} - xbar_t||, evaluated
// with the run's realized constants. `grad_bound` is G_ell for the
// full-information loop and the estimator bound pbar pbar* d G_ell for the
// bandit loop.
inline double lemma2c_bound(const RunRecord& rec, double grad_bound) {
  double mix = 2.0 * rec.theta / (1.0 - rec.kappa);
  double gsum = grad_bound + rec.g_r;
  double sum_sqrt = 0.0;
  for (long t = 1; t <= rec.horizon; ++t)
    sum_sqrt += std::sqrt(rec.eta * rec.error_model.rho_at(t));
  return mix * rec.sum_initial_norms +
         (rec.m * mix / rec.sigma) * gsum * rec.eta *
             static_cast<double>(rec.horizon) +
         rec.m * mix * std::sqrt(2.0 / rec.sigma) * sum_sqrt;
}

}  // namespace odcmd
