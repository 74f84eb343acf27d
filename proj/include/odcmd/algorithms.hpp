#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "odcmd/network.hpp"
#include "odcmd/problems.hpp"
#include "odcmd/prox.hpp"
#include "odcmd/rng.hpp"

namespace odcmd {

struct AlgorithmConfig {
  double eta = 0.0;
  ErrorModel error;
  double delta = 0.0;            // bandit exploration radius
  double xi = 0.0;               // bandit shrinkage
  double subgradient_tie = 0.0;  // c in [-1,1] for the baseline's sign(0)
  bool strict_feasibility = true;
  double feasibility_tol = 1e-9;
  std::uint64_t seed = 0;  // master seed for the sphere substreams
  long max_stored_entries = 10000000;  // iterate storage cap (T*m*d)
};

struct RoundMetrics {
  double rho = 0.0;               // rho_t of the error model
  double max_prox_step = 0.0;     // max_i ||y*_i - x_i|| (active norm)
  double max_approx_error = 0.0;  // max_i ||y_i - y*_i|| (active norm)
  double max_gap = 0.0;           // max_i realized prox objective gap
  double disagreement = 0.0;      // sum_i ||x_i - xbar|| (active norm)
  double max_estimator_dual_norm = 0.0;  // bandit: max_i ||ghat_i||_*
};

// Full trajectory of one run plus the realized constants needed to evaluate
// the regret bounds. Iterates are stored only while T*m*d stays under the
// configured cap; the per-round network losses, which regret evaluation
// needs, are always kept.
struct RunRecord {
  int m = 0, d = 0;
  long horizon = 0;
  double eta = 0.0;
  double delta = 0.0, xi = 0.0;
  ErrorModel error_model;

  bool iterates_stored = false;
  std::vector<Eigen::MatrixXd> iterates;  // index t-1: m x d node points
  Eigen::MatrixXd network_loss;  // (t-1, i): sum_j l_{j,t}(x_{i,t}) + m r(x_{i,t})
  std::vector<RoundMetrics> rounds;

  Vector initial_point;
  double sum_initial_norms = 0.0;  // sum_i ||x_{i,1}|| (active norm)
  long long oracle_queries = 0;    // two-point evaluations in this run
  long feasibility_violations = 0;
  double max_estimator_dual_norm = 0.0;

  // realized constants
  double g_ell = 0.0, g_r = 0.0;
  double zeta = 0.0;
  int window = 0;
  double theta = 1.0, kappa = 0.0;
  double sigma = 1.0, g_omega = 1.0;
  double diameter = 0.0;
  double pbar = 1.0, pbar_dual = 1.0;

  const Eigen::MatrixXd& points(long t) const {
    if (!iterates_stored) throw std::runtime_error("iterates were not stored");
    return iterates.at(static_cast<std::size_t>(t - 1));
  }
};

namespace detail {

inline Vector network_losses_generic(const LossStream& stream, long t,
                                     const Eigen::MatrixXd& points,
                                     const Regularizer& reg) {
  const int m = stream.nodes();
  Vector out(points.rows());
  for (long i = 0; i < points.rows(); ++i) {
    Vector x = points.row(i).transpose();
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += stream.value(j, t, x);
    out[i] = s + m * reg.value(x);
  }
  return out;
}

// sum_j l_{j,t}(x_i) for every node point, vectorized for the regression
// stream (the m^2 pairing dominates the runtime otherwise).
inline Vector network_losses(const LossStream& stream, long t,
                             const Eigen::MatrixXd& points,
                             const Regularizer& reg) {
  if (const auto* rs = dynamic_cast<const RegressionStream*>(&stream)) {
    const int m = rs->nodes();
    Eigen::MatrixXd pred =
        rs->round_features(t) * points.transpose();  // (j, i) = <b_j, x_i>
    pred.colwise() -= rs->round_responses(t);
    Vector out = 0.5 * pred.array().square().colwise().sum().transpose();
    for (long i = 0; i < points.rows(); ++i) {
      Vector x = points.row(i).transpose();
      out[i] += m * (0.5 * rs->lambda1() * x.squaredNorm() + reg.value(x));
    }
    return out;
  }
  return network_losses_generic(stream, t, points, reg);
}

inline void check_run_args(const LossStream& stream,
                           const NetworkSchedule& net,
                           const AlgorithmConfig& cfg, long T) {
  if (net.node_count() != stream.nodes())
    throw std::invalid_argument("network and stream disagree on node count");
  if (T < 1 || T > stream.horizon())
    throw std::invalid_argument("horizon T must be in [1, stream horizon]");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("step size eta must be > 0");
}

inline void fill_realized_constants(RunRecord& rec, const LossStream& stream,
                                    const NetworkSchedule& net,
                                    const MirrorMap& map,
                                    const ConstraintSet& set,
                                    const Regularizer& reg,
                                    std::optional<double> radius_override) {
  LpNorm norm = map.norm();
  LipschitzBounds lb = lipschitz_bounds(stream, set, map, reg, radius_override);
  rec.g_ell = lb.g_ell;
  rec.g_r = lb.g_r;
  rec.zeta = net.realized_zeta();
  rec.window = net.realized_window();
  ConsensusConstants cc = ConsensusConstants::from(rec.zeta, rec.window, rec.m);
  rec.theta = cc.theta;
  rec.kappa = cc.kappa;
  rec.sigma = map.sigma();
  rec.g_omega = map.grad_lipschitz();
  rec.diameter = set.diameter(norm, rec.d);
  rec.pbar = norm.pbar(rec.d);
  rec.pbar_dual = norm.pbar_dual(rec.d);
}

inline RoundMetrics base_metrics(const LpNorm& norm,
                                 const Eigen::MatrixXd& points) {
  RoundMetrics rm;
  Vector mean = points.colwise().mean().transpose();
  for (long i = 0; i < points.rows(); ++i)
    rm.disagreement += norm.value(points.row(i).transpose() - mean);
  return rm;
}

}  // namespace detail

// Online distributed composite mirror descent under full-information
// feedback. Each round every node takes a rho_t-approximate composite prox
// step from its own gradient, then averages the post-prox points of its
// instant neighbors through the doubly stochastic weights.
inline RunRecord run_odcmd(const LossStream& stream, const NetworkSchedule& net,
                           const MirrorMap& map, const ConstraintSet& set,
                           const Regularizer& reg, const AlgorithmConfig& cfg,
                           long T,
                           std::optional<double> radius_override = {}) {
  detail::check_run_args(stream, net, cfg, T);
  const int m = stream.nodes();
  const int d = stream.dim();
  const LpNorm norm = map.norm();

  RunRecord rec;
  rec.m = m;
  rec.d = d;
  rec.horizon = T;
  rec.eta = cfg.eta;
  rec.error_model = cfg.error;
  rec.initial_point = argmin_omega(map, set, d);
  rec.sum_initial_norms = m * norm.value(rec.initial_point);
  rec.iterates_stored = T * static_cast<long>(m) * d <= cfg.max_stored_entries;
  rec.network_loss.resize(T, m);
  rec.rounds.reserve(T);
  if (rec.iterates_stored) rec.iterates.reserve(T);

  Eigen::MatrixXd points = rec.initial_point.transpose().replicate(m, 1);
  Eigen::MatrixXd post_prox(m, d);
  for (long t = 1; t <= T; ++t) {
    if (rec.iterates_stored) rec.iterates.push_back(points);
    rec.network_loss.row(t - 1) =
        detail::network_losses(stream, t, points, reg).transpose();

    RoundMetrics rm = detail::base_metrics(norm, points);
    rm.rho = cfg.error.rho_at(t);
    for (int i = 0; i < m; ++i) {
      Vector x = points.row(i).transpose();
      Vector g = stream.gradient(i, t, x);
      ProxApproxResult pr =
          prox_approx(map, set, reg, x, g, cfg.eta, cfg.error, t);
      post_prox.row(i) = pr.point.transpose();
      rm.max_prox_step =
          std::max(rm.max_prox_step, norm.value(pr.exact_point - x));
      rm.max_approx_error =
          std::max(rm.max_approx_error, norm.value(pr.point - pr.exact_point));
      rm.max_gap = std::max(rm.max_gap, pr.realized_gap);
    }
    rec.rounds.push_back(rm);

    points = net.weights(t) * post_prox;
    for (int i = 0; i < m; ++i)
      if (!set.contains(points.row(i).transpose(), cfg.feasibility_tol))
        throw std::runtime_error(
            "infeasible consensus iterate at round " + std::to_string(t) +
            ", node " + std::to_string(i) +
            " (the post-prox points are feasible and the set is convex; this "
            "indicates a bug)");
  }
  detail::fill_realized_constants(rec, stream, net, map, set, reg,
                                  radius_override);
  return rec;
}

// Bandit variant: the gradient is replaced by the two-point estimator
// ghat = (d / 2 delta)(l(x + delta u) - l(x - delta u)) u with u uniform on
// the unit sphere, and the prox step runs over the shrunk set (1-xi)K so
// both query points stay inside K whenever delta <= xi R_lower.
inline RunRecord run_banodcmd(const LossStream& stream,
                              const NetworkSchedule& net, const MirrorMap& map,
                              const ConstraintSet& set, const Regularizer& reg,
                              const AlgorithmConfig& cfg, long T,
                              std::optional<double> radius_override = {}) {
  detail::check_run_args(stream, net, cfg, T);
  if (!(cfg.delta > 0.0))
    throw std::invalid_argument("bandit mode requires delta > 0");
  if (!(cfg.xi >= 0.0 && cfg.xi < 1.0))
    throw std::invalid_argument("bandit mode requires 0 <= xi < 1");
  const double inner = set.inner_radius();
  if (!(inner > 0.0))
    throw std::invalid_argument(
        "bandit mode requires a set with positive inner radius");
  if (cfg.delta > cfg.xi * inner)
    throw std::invalid_argument("bandit exploration requires delta <= xi * R_lower");

  const int m = stream.nodes();
  const int d = stream.dim();
  const LpNorm norm = map.norm();
  const ConstraintSet shrunk = set.shrunk(cfg.xi);

  RunRecord rec;
  rec.m = m;
  rec.d = d;
  rec.horizon = T;
  rec.eta = cfg.eta;
  rec.delta = cfg.delta;
  rec.xi = cfg.xi;
  rec.error_model = cfg.error;
  rec.initial_point = argmin_omega(map, shrunk, d);
  rec.sum_initial_norms = m * norm.value(rec.initial_point);
  rec.iterates_stored = T * static_cast<long>(m) * d <= cfg.max_stored_entries;
  rec.network_loss.resize(T, m);
  rec.rounds.reserve(T);
  if (rec.iterates_stored) rec.iterates.reserve(T);

  const long long queries_before = stream.query_count();
  Eigen::MatrixXd points = rec.initial_point.transpose().replicate(m, 1);
  Eigen::MatrixXd post_prox(m, d);
  for (long t = 1; t <= T; ++t) {
    if (rec.iterates_stored) rec.iterates.push_back(points);
    rec.network_loss.row(t - 1) =
        detail::network_losses(stream, t, points, reg).transpose();

    RoundMetrics rm = detail::base_metrics(norm, points);
    rm.rho = cfg.error.rho_at(t);
    for (int i = 0; i < m; ++i) {
      Vector x = points.row(i).transpose();
      Vector u = substream(cfg.seed, kStreamSphere,
                           static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(t))
                     .unit_sphere(d);
      for (double side : {1.0, -1.0}) {
        if (!set.contains(x + side * cfg.delta * u, cfg.feasibility_tol)) {
          if (cfg.strict_feasibility)
            throw std::runtime_error(
                "bandit query point outside the feasible set at round " +
                std::to_string(t) + ", node " + std::to_string(i));
          ++rec.feasibility_violations;
        }
      }
      auto [plus, minus] = stream.two_point(i, t, x, cfg.delta, u);
      Vector ghat = (d / (2.0 * cfg.delta)) * (plus - minus) * u;
      double dual = norm.dual_value(ghat);
      rm.max_estimator_dual_norm = std::max(rm.max_estimator_dual_norm, dual);
      rec.max_estimator_dual_norm =
          std::max(rec.max_estimator_dual_norm, dual);

      ProxApproxResult pr =
          prox_approx(map, shrunk, reg, x, ghat, cfg.eta, cfg.error, t);
      post_prox.row(i) = pr.point.transpose();
      rm.max_prox_step =
          std::max(rm.max_prox_step, norm.value(pr.exact_point - x));
      rm.max_approx_error =
          std::max(rm.max_approx_error, norm.value(pr.point - pr.exact_point));
      rm.max_gap = std::max(rm.max_gap, pr.realized_gap);
    }
    rec.rounds.push_back(rm);

    points = net.weights(t) * post_prox;
    for (int i = 0; i < m; ++i)
      if (!shrunk.contains(points.row(i).transpose(), cfg.feasibility_tol))
        throw std::runtime_error("infeasible bandit iterate at round " +
                                 std::to_string(t) + ", node " +
                                 std::to_string(i));
  }
  rec.oracle_queries = stream.query_count() - queries_before;
  detail::fill_realized_constants(rec, stream, net, map, set, reg,
                                  radius_override);
  return rec;
}

// The comparison algorithm: a full subgradient step on l + lambda2 ||.||_1
// (with the configurable tie value c at zero coordinates), radial projection
// onto the ball, then consensus averaging. Euclidean geometry only.
inline RunRecord run_subgradient_baseline(const LossStream& stream,
                                          const NetworkSchedule& net,
                                          const ConstraintSet& set,
                                          const Regularizer& reg,
                                          const AlgorithmConfig& cfg, long T) {
  detail::check_run_args(stream, net, cfg, T);
  if (set.kind() != SetKind::kBall)
    throw std::invalid_argument("the subgradient baseline needs a ball set");
  if (!(cfg.subgradient_tie >= -1.0 && cfg.subgradient_tie <= 1.0))
    throw std::invalid_argument("subgradient tie value must lie in [-1,1]");
  const MirrorMap map = MirrorMap::euclidean();
  const LpNorm norm = map.norm();
  const int m = stream.nodes();
  const int d = stream.dim();

  RunRecord rec;
  rec.m = m;
  rec.d = d;
  rec.horizon = T;
  rec.eta = cfg.eta;
  rec.initial_point = argmin_omega(map, set, d);
  rec.sum_initial_norms = m * norm.value(rec.initial_point);
  rec.iterates_stored = T * static_cast<long>(m) * d <= cfg.max_stored_entries;
  rec.network_loss.resize(T, m);
  rec.rounds.reserve(T);
  if (rec.iterates_stored) rec.iterates.reserve(T);

  Eigen::MatrixXd points = rec.initial_point.transpose().replicate(m, 1);
  Eigen::MatrixXd post_step(m, d);
  for (long t = 1; t <= T; ++t) {
    if (rec.iterates_stored) rec.iterates.push_back(points);
    rec.network_loss.row(t - 1) =
        detail::network_losses(stream, t, points, reg).transpose();

    RoundMetrics rm = detail::base_metrics(norm, points);
    for (int i = 0; i < m; ++i) {
      Vector x = points.row(i).transpose();
      Vector g = stream.gradient(i, t, x) +
                 reg.subgradient(x, cfg.subgradient_tie);
      Vector y = set.project(x - cfg.eta * g);
      post_step.row(i) = y.transpose();
      rm.max_prox_step = std::max(rm.max_prox_step, norm.value(y - x));
    }
    rec.rounds.push_back(rm);
    points = net.weights(t) * post_step;
  }
  detail::fill_realized_constants(rec, stream, net, map, set, reg, {});
  return rec;
}

// Inputs for evaluating the regret-bound right-hand sides with realized
// constants.
struct BoundInputs {
  double g_ell = 0.0, g_r = 0.0;
  double sigma = 1.0, g_omega = 1.0;
  double diameter = 0.0;
  double theta = 1.0, kappa = 0.0;
  int m = 1, d = 1;
  double pbar = 1.0, pbar_dual = 1.0;
  double radius = 0.0;  // R_upper, bandit terms only
  double sum_initial_norms = 0.0;
  double bregman_to_comparator = 0.0;  // sum_i V_w(x*, x_{i,1}) (or shrunk x*)
};

inline BoundInputs bound_inputs_from_run(const RunRecord& rec,
                                         const MirrorMap& map,
                                         const ConstraintSet& set,
                                         const Vector& x_star) {
  BoundInputs b;
  b.g_ell = rec.g_ell;
  b.g_r = rec.g_r;
  b.sigma = rec.sigma;
  b.g_omega = rec.g_omega;
  b.diameter = rec.diameter;
  b.theta = rec.theta;
  b.kappa = rec.kappa;
  b.m = rec.m;
  b.d = rec.d;
  b.pbar = rec.pbar;
  b.pbar_dual = rec.pbar_dual;
  b.radius = set.radius();
  b.sum_initial_norms = rec.sum_initial_norms;
  Vector target = rec.xi > 0.0 ? Vector((1.0 - rec.xi) * x_star) : x_star;
  b.bregman_to_comparator = rec.m * map.bregman(target, rec.initial_point);
  return b;
}

namespace detail {

inline void check_bound_inputs(const BoundInputs& c, double eta) {
  if (!(c.kappa < 1.0) || !(c.kappa >= 0.0))
    throw std::invalid_argument("contraction factor kappa must lie in [0,1)");
  if (!(c.sigma > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("bound needs sigma > 0 and eta > 0");
}

inline std::pair<double, double> rho_sums(const std::vector<double>& rho,
                                          double eta) {
  double s_eta_rho = 0.0, s_rho_eta = 0.0;
  for (double r : rho) {
    s_eta_rho += std::sqrt(eta * r);
    s_rho_eta += std::sqrt(r / eta);
  }
  return {s_eta_rho, s_rho_eta};
}

}  // namespace detail

// Full-information regret bound:
// A0/T + A1/(eta T) + A2 eta + (A3/T) sum sqrt(eta rho_t)
//                            + (A4/T) sum sqrt(rho_t / eta).
inline double theorem1_bound(const BoundInputs& c, long T, double eta,
                             const std::vector<double>& rho) {
  detail::check_bound_inputs(c, eta);
  double mix = 2.0 * c.theta / (1.0 - c.kappa);
  double gsum = c.g_ell + c.g_r;
  double a0 = mix * gsum * c.sum_initial_norms;
  double a1 = c.bregman_to_comparator;
  double a2 = (c.m / c.sigma) *
              (0.5 * c.g_ell * c.g_ell + c.g_r * gsum + mix * gsum * gsum);
  double a3 = c.m * std::sqrt(2.0 / c.sigma) * (c.g_ell + mix * gsum);
  double a4 = 2.0 * c.m * std::sqrt(2.0 / c.sigma) * c.g_omega * c.diameter;
  auto [s_eta_rho, s_rho_eta] = detail::rho_sums(rho, eta);
  double bound = a0 / T + a1 / (eta * T) + a2 * eta + a3 / T * s_eta_rho;
  if (s_rho_eta > 0.0) {
    if (!std::isfinite(a4))
      throw std::invalid_argument(
          "the error term needs a finite diameter; supply a radius override "
          "for unbounded sets");
    bound += a4 / T * s_rho_eta;
  }
  return bound;
}

// Bandit regret bound, with the two extra exploration/shrinkage terms
// B5 delta + B6 xi.
inline double theorem2_bound(const BoundInputs& c, long T, double eta,
                             const std::vector<double>& rho, double delta,
                             double xi) {
  detail::check_bound_inputs(c, eta);
  double mix = 2.0 * c.theta / (1.0 - c.kappa);
  double gsum = c.g_ell + c.g_r;
  double gest = c.pbar * c.pbar_dual * c.d * c.g_ell;  // estimator bound
  double b0 = mix * gsum * c.sum_initial_norms;
  double b1 = c.bregman_to_comparator;
  double b2 = (c.m / c.sigma) * (0.5 * gest * gest + c.g_r * (gest + c.g_r) +
                                 mix * gsum * (gest + c.g_r));
  double b3 = c.m * std::sqrt(2.0 / c.sigma) * (gest + mix * gsum);
  double b4 = 4.0 * c.m * std::sqrt(2.0 / c.sigma) * c.pbar * c.g_omega * c.radius;
  double b5 = 2.0 * c.m * c.g_ell;
  double b6 = c.m * c.pbar * gsum * c.radius;
  auto [s_eta_rho, s_rho_eta] = detail::rho_sums(rho, eta);
  double bound = b0 / T + b1 / (eta * T) + b2 * eta + b3 / T * s_eta_rho +
                 b5 * delta + b6 * xi;
  if (s_rho_eta > 0.0) {
    if (!std::isfinite(b4))
      throw std::invalid_argument("the error term needs a finite radius");
    bound += b4 / T * s_rho_eta;
  }
  return bound;
}

// The rho_t sequence a run actually used, for plugging into the bounds.
inline std::vector<double> rho_schedule(const ErrorModel& model, long T) {
  std::vector<double> rho(static_cast<std::size_t>(T));
  for (long t = 1; t <= T; ++t)
    rho[static_cast<std::size_t>(t - 1)] = model.rho_at(t);
  return rho;
}

}  // namespace odcmd
