#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "odcmd/rng.hpp"

namespace odcmd {

using Edge = std::pair<int, int>;
using EdgeList = std::vector<Edge>;
using Matrix = Eigen::MatrixXd;

// Metropolis weights for an undirected edge set: symmetric,
// [W]_ij = 1/(1 + max(deg_i, deg_j)) on edges, diagonal absorbs the
// remainder. Doubly stochastic by construction.
inline Matrix metropolis_weights(const EdgeList& edges, int m) {
  std::vector<int> deg(m, 0);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= m || j >= m || i == j)
      throw std::invalid_argument("metropolis_weights: bad edge");
    ++deg[i];
    ++deg[j];
  }
  Matrix w = Matrix::Zero(m, m);
  for (const auto& [i, j] : edges) {
    double v = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    w(i, j) += v;
    w(j, i) += v;
  }
  for (int i = 0; i < m; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

inline bool is_connected(const EdgeList& edges, int m) {
  if (m <= 1) return true;
  std::vector<std::vector<int>> adj(m);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(m, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == m;
}

// Contraction constants of the weight-matrix products:
// theta = (1 - zeta/(4 m^2))^{-2}, kappa = (1 - zeta/(4 m^2))^{1/B}.
struct ConsensusConstants {
  double theta = 1.0;
  double kappa = 0.0;

  static ConsensusConstants from(double zeta, int window, int m) {
    if (!(zeta > 0.0) || window < 1 || m < 1)
      throw std::invalid_argument(
          "consensus constants require zeta > 0, B >= 1, m >= 1");
    double base = 1.0 - zeta / (4.0 * m * m);
    ConsensusConstants c;
    c.theta = 1.0 / (base * base);
    c.kappa = std::pow(base, 1.0 / window);
    return c;
  }
};

// Time-indexed source of doubly stochastic weight matrices. All supported
// schedules are periodic: a list of (edge set, weight matrix) phases cycled
// over rounds t = 1, 2, ...
class NetworkSchedule {
 public:
  // Fixed graph, active every round.
  static NetworkSchedule fixed(int m, EdgeList edges) {
    return NetworkSchedule(m, {std::move(edges)});
  }

  static NetworkSchedule ring(int m) {
    EdgeList edges;
    if (m == 2) edges.push_back({0, 1});
    if (m > 2)
      for (int i = 0; i < m; ++i) edges.push_back({i, (i + 1) % m});
    return fixed(m, std::move(edges));
  }

  static NetworkSchedule complete(int m) {
    EdgeList edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) edges.push_back({i, j});
    return fixed(m, std::move(edges));
  }

  // Seeded Erdos-Renyi base graph, resampled until connected.
  static EdgeList erdos_renyi_connected(int m, double edge_prob,
                                        std::uint64_t seed) {
    if (m == 1) return {};
    Rng rng = substream(seed, kStreamGraph);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      EdgeList edges;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (rng.uniform01() < edge_prob) edges.push_back({i, j});
      if (is_connected(edges, m)) return edges;
    }
    throw std::runtime_error("could not sample a connected base graph");
  }

  // The base edge set is split once (seeded, uniformly) into two halves;
  // odd rounds activate the first half, even rounds the other, so the union
  // of any two consecutive rounds is the full base graph and B = 2.
  static NetworkSchedule alternating_halves(int m, EdgeList base,
                                            std::uint64_t seed) {
    if (!is_connected(base, m))
      throw std::invalid_argument(
          "alternating_halves requires a connected base graph");
    Rng rng = substream(seed, kStreamEdgeSplit);
    // Fisher-Yates with portable draws
    for (std::size_t i = base.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(base[i - 1], base[j]);
    }
    std::size_t half = (base.size() + 1) / 2;
    EdgeList odd(base.begin(), base.begin() + half);
    EdgeList even(base.begin() + half, base.end());
    if (base.empty()) return NetworkSchedule(m, {EdgeList{}});
    return NetworkSchedule(m, {std::move(odd), std::move(even)});
  }

  static NetworkSchedule custom(int m, std::vector<EdgeList> phases) {
    if (phases.empty()) throw std::invalid_argument("empty custom schedule");
    return NetworkSchedule(m, std::move(phases));
  }

  int node_count() const { return m_; }
  int period() const { return static_cast<int>(phases_.size()); }

  const Matrix& weights(long t) const { return weights_[phase_index(t)]; }
  const EdgeList& edges(long t) const { return phases_[phase_index(t)]; }

  // Smallest positive weight appearing anywhere in the schedule.
  double realized_zeta() const { return zeta_; }

  // Smallest B such that every disjoint block of B consecutive rounds has a
  // connected union graph, probed over `horizon` rounds; 0 if none works.
  int realized_window(long horizon = 0) const {
    if (horizon <= 0) horizon = 2 * period();
    for (int b = 1; b <= horizon; ++b) {
      bool ok = true;
      for (long k = 0; (k + 1) * b <= horizon && ok; ++k) {
        EdgeList u;
        for (long t = k * b + 1; t <= (k + 1) * b; ++t) {
          const EdgeList& e = edges(t);
          u.insert(u.end(), e.begin(), e.end());
        }
        ok = is_connected(u, m_);
      }
      if (ok) return b;
    }
    return 0;
  }

  ConsensusConstants constants(long horizon = 0) const {
    int b = realized_window(horizon);
    if (b == 0)
      throw std::runtime_error("schedule has no connectivity window");
    return ConsensusConstants::from(zeta_, b, m_);
  }

 private:
  NetworkSchedule(int m, std::vector<EdgeList> phases)
      : m_(m), phases_(std::move(phases)) {
    if (m < 1) throw std::invalid_argument("node count must be >= 1");
    weights_.reserve(phases_.size());
    zeta_ = 1.0;
    for (const auto& e : phases_) {
      Matrix w = metropolis_weights(e, m_);
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          if (w(i, j) > 0.0) zeta_ = std::min(zeta_, w(i, j));
      weights_.push_back(std::move(w));
    }
  }

  std::size_t phase_index(long t) const {
    if (t < 1) throw std::invalid_argument("round index must be >= 1");
    return static_cast<std::size_t>((t - 1) % phases_.size());
  }

  int m_;
  std::vector<EdgeList> phases_;
  std::vector<Matrix> weights_;
  double zeta_ = 1.0;
};

// max_ij | [W(t) W(t-1) ... W(tau)]_ij - 1/m |
inline double consensus_product_deviation(const NetworkSchedule& schedule,
                                          long t, long tau) {
  if (!(t >= tau && tau >= 1))
    throw std::invalid_argument("need t >= tau >= 1");
  const int m = schedule.node_count();
  Matrix p = schedule.weights(tau);
  for (long s = tau + 1; s <= t; ++s) p = schedule.weights(s) * p;
  return (p.array() - 1.0 / m).abs().maxCoeff();
}

struct ContractionCheck {
  long violations = 0;
  double worst_ratio = 0.0;  // max over pairs of deviation / bound
};

// Exhaustively checks the contraction bound
// |[W(t:tau)]_ij - 1/m| <= theta kappa^{t-tau} over all 1 <= tau <= t <= T.
inline ContractionCheck consensus_contraction_check(
    const NetworkSchedule& schedule, long horizon,
    const ConsensusConstants& c) {
  const int m = schedule.node_count();
  ContractionCheck out;
  for (long tau = 1; tau <= horizon; ++tau) {
    Matrix p = Matrix::Identity(m, m);
    for (long t = tau; t <= horizon; ++t) {
      p = schedule.weights(t) * p;
      double dev = (p.array() - 1.0 / m).abs().maxCoeff();
      double bound = c.theta * std::pow(c.kappa, static_cast<double>(t - tau));
      if (dev > bound) ++out.violations;
      if (bound > 0.0) out.worst_ratio = std::max(out.worst_ratio, dev / bound);
    }
  }
  return out;
}

struct Assumption1Report {
  bool ok = false;
  double max_stochasticity_deviation = 0.0;  // worst row/col sum deviation
  double min_edge_weight_on_active = 1.0;    // realized zeta over active edges
  double realized_zeta = 0.0;
  int realized_window = 0;
  long offending_round = 0;  // first round violating double stochasticity
  std::string message;
};

// Runtime check of the network assumptions over the first `horizon` rounds:
// double stochasticity within 1e-12, a positive uniform lower bound on the
// active weights, and a finite connectivity window.
inline Assumption1Report verify_assumption1(const NetworkSchedule& schedule,
                                            long horizon) {
  Assumption1Report rep;
  const int m = schedule.node_count();
  rep.realized_zeta = schedule.realized_zeta();
  long probe = std::min<long>(horizon, schedule.period());
  for (long t = 1; t <= probe; ++t) {
    const Matrix& w = schedule.weights(t);
    double dev = std::max((w.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                          (w.colwise().sum().array() - 1.0).abs().maxCoeff());
    if (dev > rep.max_stochasticity_deviation) {
      rep.max_stochasticity_deviation = dev;
      if (dev > 1e-12 && rep.offending_round == 0) rep.offending_round = t;
    }
    for (int i = 0; i < m; ++i)
      rep.min_edge_weight_on_active =
          std::min(rep.min_edge_weight_on_active, w(i, i));
    for (const auto& [i, j] : schedule.edges(t))
      rep.min_edge_weight_on_active =
          std::min({rep.min_edge_weight_on_active, w(i, j), w(j, i)});
  }
  rep.realized_window = schedule.realized_window(horizon);
  if (rep.offending_round != 0) {
    rep.message = "weight matrix at round " +
                  std::to_string(rep.offending_round) +
                  " is not doubly stochastic";
    return rep;
  }
  if (rep.realized_window == 0) {
    rep.message = "no connectivity window up to horizon " +
                  std::to_string(horizon);
    return rep;
  }
  if (!(rep.min_edge_weight_on_active > 0.0)) {
    rep.message = "active edge with nonpositive weight";
    return rep;
  }
  rep.ok = true;
  return rep;
}

}  // namespace odcmd
