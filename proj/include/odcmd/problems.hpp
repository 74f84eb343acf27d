#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "odcmd/geometry.hpp"
#include "odcmd/rng.hpp"
#include "odcmd/sets.hpp"

namespace odcmd {

// Per-node, per-round loss oracle. Value and gradient queries are free-form;
// two-point queries go through two_point() which audits the
// two-evaluations-per-round contract via a query counter.
class LossStream {
 public:
  LossStream(int m, int d, long horizon) : m_(m), d_(d), horizon_(horizon) {
    if (m < 1 || d < 1 || horizon < 1)
      throw std::invalid_argument("stream dimensions must be >= 1");
  }
  virtual ~LossStream() = default;
  LossStream(const LossStream&) = delete;
  LossStream& operator=(const LossStream&) = delete;
  LossStream(LossStream&& other) noexcept
      : m_(other.m_),
        d_(other.d_),
        horizon_(other.horizon_),
        queries_(other.query_count()) {}

  int nodes() const { return m_; }
  int dim() const { return d_; }
  long horizon() const { return horizon_; }

  virtual double value(int i, long t, const Vector& x) const = 0;
  virtual Vector gradient(int i, long t, const Vector& x) const = 0;

  // Two loss evaluations at x +- delta*u. Feasibility of the query points is
  // the caller's responsibility; this only counts evaluations.
  std::pair<double, double> two_point(int i, long t, const Vector& x,
                                      double delta, const Vector& u) const {
    queries_.fetch_add(2, std::memory_order_relaxed);
    return {value(i, t, x + delta * u), value(i, t, x - delta * u)};
  }

  long long query_count() const {
    return queries_.load(std::memory_order_relaxed);
  }
  void reset_query_count() const { queries_.store(0); }

  // Closed-form uniform bound on ||grad l_{i,t}(x)||_* over the set, where
  // the dual norm is l_q.
  virtual double gradient_bound(const ConstraintSet& set,
                                double dual_exponent) const = 0;

  // Aggregated offline objective sum_{t,j} l_{j,t}(x) and its gradient,
  // consumed by the comparator solver. Default is the straightforward loop.
  virtual double sum_value(const Vector& x) const {
    double s = 0.0;
    for (long t = 1; t <= horizon_; ++t)
      for (int i = 0; i < m_; ++i) s += value(i, t, x);
    return s;
  }
  virtual Vector sum_gradient(const Vector& x) const {
    Vector s = Vector::Zero(d_);
    for (long t = 1; t <= horizon_; ++t)
      for (int i = 0; i < m_; ++i) s += gradient(i, t, x);
    return s;
  }
  // Strong-convexity modulus of the aggregated objective (0 if unknown).
  virtual double sum_strong_convexity() const { return 0.0; }

 private:
  int m_, d_;
  long horizon_;
  mutable std::atomic<long long> queries_{0};
};

// The planted regression parameter: first floor(d/2) coordinates one, rest
// zero.
inline Vector planted_parameter(int d) {
  Vector x0 = Vector::Zero(d);
  for (int i = 0; i < d / 2; ++i) x0[i] = 1.0;
  return x0;
}

// Online regularized linear regression stream:
//   l_{i,t}(x) = 0.5 (<b_{i,t}, x> - z_{i,t})^2 + (lambda1/2) ||x||_2^2
// with feature entries uniform on (-1,1) and responses
// z = <b, x0> + eps, eps ~ N(0,1). The l2 weight lambda1 is folded into the
// smooth loss; the l1 term lives in the Regularizer. Features and noise come
// from per-(i,t) substreams, so changing m or the horizon does not reshuffle
// the draws of other (i,t) pairs.
class RegressionStream final : public LossStream {
 public:
  static RegressionStream generate(int m, int d, long horizon,
                                   std::uint64_t seed, double lambda1,
                                   double noise_sd = 1.0) {
    Eigen::MatrixXd features(m * horizon, d);
    Vector responses(m * horizon);
    Vector x0 = planted_parameter(d);
    for (long t = 1; t <= horizon; ++t) {
      for (int i = 0; i < m; ++i) {
        Rng fr = substream(seed, kStreamFeatures, static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(t));
        Rng nr = substream(seed, kStreamNoise, static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(t));
        long row = (t - 1) * m + i;
        for (int s = 0; s < d; ++s) features(row, s) = fr.uniform(-1.0, 1.0);
        responses[row] = features.row(row).dot(x0) + noise_sd * nr.normal();
      }
    }
    return RegressionStream(m, d, horizon, lambda1, std::move(features),
                            std::move(responses));
  }

  RegressionStream(int m, int d, long horizon, double lambda1,
                   Eigen::MatrixXd features, Vector responses)
      : LossStream(m, d, horizon),
        lambda1_(lambda1),
        features_(std::move(features)),
        responses_(std::move(responses)) {
    if (features_.rows() != m * horizon || features_.cols() != d ||
        responses_.size() != m * horizon)
      throw std::invalid_argument("regression data has wrong shape");
  }

  double lambda1() const { return lambda1_; }
  Vector feature(int i, long t) const {
    return features_.row(row(i, t)).transpose();
  }
  double response(int i, long t) const { return responses_[row(i, t)]; }
  // all features of round t as an m x d block
  auto round_features(long t) const {
    return features_.middleRows((t - 1) * nodes(), nodes());
  }
  auto round_responses(long t) const {
    return responses_.segment((t - 1) * nodes(), nodes());
  }

  double value(int i, long t, const Vector& x) const override {
    double r = features_.row(row(i, t)).dot(x) - responses_[row(i, t)];
    return 0.5 * r * r + 0.5 * lambda1_ * x.squaredNorm();
  }

  Vector gradient(int i, long t, const Vector& x) const override {
    double r = features_.row(row(i, t)).dot(x) - responses_[row(i, t)];
    return r * features_.row(row(i, t)).transpose() + lambda1_ * x;
  }

  // max over the data of (||b||_2 R + |z|) ||b||_q + lambda1 sup_K ||x||_q,
  // using K inside the Euclidean ball of radius R.
  double gradient_bound(const ConstraintSet& set,
                        double dual_exponent) const override {
    if (set.is_free())
      throw std::invalid_argument(
          "gradient bound needs a bounded set (or an explicit radius override)");
    const double radius = set.radius();
    const double sup_xq =
        radius * LpNorm::equivalence_vs_l2(dual_exponent, dim());
    double bound = 0.0;
    for (long r = 0; r < features_.rows(); ++r) {
      Vector b = features_.row(r).transpose();
      double bq = LpNorm::lp(b, dual_exponent);
      bound = std::max(bound, (b.norm() * radius + std::abs(responses_[r])) * bq +
                                  lambda1_ * sup_xq);
    }
    return bound;
  }

  double sum_value(const Vector& x) const override {
    build_aggregate();
    return 0.5 * x.dot(quad_ * x) - linear_.dot(x) + constant_ +
           0.5 * lambda1_ * nodes() * horizon() * x.squaredNorm();
  }
  Vector sum_gradient(const Vector& x) const override {
    build_aggregate();
    return quad_ * x - linear_ +
           (lambda1_ * nodes() * horizon()) * x;
  }
  double sum_strong_convexity() const override {
    return lambda1_ * nodes() * horizon();
  }

  // Columnar schema: t,i,b_0,...,b_{d-1},z — one row per (round, node).
  void export_csv(std::ostream& os) const {
    os << "t,i";
    for (int s = 0; s < dim(); ++s) os << ",b" << s;
    os << ",z\n";
    char buf[32];
    for (long t = 1; t <= horizon(); ++t)
      for (int i = 0; i < nodes(); ++i) {
        os << t << ',' << i;
        for (int s = 0; s < dim(); ++s) {
          std::snprintf(buf, sizeof(buf), "%.17g", features_(row(i, t), s));
          os << ',' << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g", responses_[row(i, t)]);
        os << ',' << buf << '\n';
      }
  }

  static RegressionStream import_csv(std::istream& is, double lambda1) {
    std::string line;
    if (!std::getline(is, line))
      throw std::invalid_argument("empty stream file");
    int d = -2;  // header has d+3 fields: t,i,b...,z
    for (char c : line) d += (c == ',');
    if (d < 1) throw std::invalid_argument("malformed stream header");
    std::vector<double> feat;
    std::vector<double> resp;
    long rows = 0;
    long max_t = 0;
    int max_i = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string field;
      std::getline(ss, field, ',');
      long t = std::stol(field);
      std::getline(ss, field, ',');
      int i = std::stoi(field);
      max_t = std::max(max_t, t);
      max_i = std::max(max_i, i);
      for (int s = 0; s < d; ++s) {
        std::getline(ss, field, ',');
        feat.push_back(std::stod(field));
      }
      std::getline(ss, field, ',');
      resp.push_back(std::stod(field));
      ++rows;
    }
    int m = max_i + 1;
    if (rows != max_t * m)
      throw std::invalid_argument("stream file is not a complete (t,i) grid");
    Eigen::MatrixXd features(rows, d);
    for (long r = 0; r < rows; ++r)
      for (int s = 0; s < d; ++s) features(r, s) = feat[r * d + s];
    return RegressionStream(
        m, d, max_t, lambda1, std::move(features),
        Eigen::Map<Vector>(resp.data(), static_cast<long>(resp.size())));
  }

 private:
  long row(int i, long t) const {
    if (i < 0 || i >= nodes() || t < 1 || t > horizon())
      throw std::out_of_range("loss index (i,t) out of range");
    return (t - 1) * nodes() + i;
  }

  void build_aggregate() const {
    if (aggregate_built_) return;
    quad_ = features_.transpose() * features_;
    linear_ = features_.transpose() * responses_;
    constant_ = 0.5 * responses_.squaredNorm();
    aggregate_built_ = true;
  }

  double lambda1_;
  Eigen::MatrixXd features_;  // (T*m) x d, row (t-1)*m + i
  Vector responses_;
  mutable bool aggregate_built_ = false;
  mutable Eigen::MatrixXd quad_;
  mutable Vector linear_;
  mutable double constant_ = 0.0;
};

// Free-form stream for tests: value/gradient provided as callables together
// with an explicit gradient bound.
class CustomStream final : public LossStream {
 public:
  using ValueFn = std::function<double(int, long, const Vector&)>;
  using GradFn = std::function<Vector(int, long, const Vector&)>;

  CustomStream(int m, int d, long horizon, ValueFn value, GradFn gradient,
               double gradient_bound, double strong_convexity = 0.0)
      : LossStream(m, d, horizon),
        value_(std::move(value)),
        gradient_(std::move(gradient)),
        bound_(gradient_bound),
        mu_(strong_convexity) {}

  double value(int i, long t, const Vector& x) const override {
    return value_(i, t, x);
  }
  Vector gradient(int i, long t, const Vector& x) const override {
    return gradient_(i, t, x);
  }
  double gradient_bound(const ConstraintSet&, double) const override {
    return bound_;
  }
  double sum_strong_convexity() const override { return mu_; }

 private:
  ValueFn value_;
  GradFn gradient_;
  double bound_;
  double mu_;
};

struct LipschitzBounds {
  double g_ell = 0.0;
  double g_r = 0.0;
};

// Closed-form Lipschitz constants of the loss and the regularizer over the
// set under the map's norm. An unbounded set needs an explicit Euclidean
// radius override (the bound is then reported for the overridden ball and
// flagged by the caller).
inline LipschitzBounds lipschitz_bounds(
    const LossStream& stream, const ConstraintSet& set, const MirrorMap& map,
    const Regularizer& reg, std::optional<double> radius_override = {}) {
  ConstraintSet effective =
      (set.is_free() && radius_override) ? ConstraintSet::ball(*radius_override)
                                         : set;
  LipschitzBounds b;
  b.g_ell = stream.gradient_bound(effective, map.norm().dual_exponent());
  b.g_r = reg.lipschitz(map.norm(), effective, stream.dim());
  return b;
}

}  // namespace odcmd
