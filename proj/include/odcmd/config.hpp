#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "odcmd/algorithms.hpp"
#include "odcmd/geometry.hpp"
#include "odcmd/network.hpp"
#include "odcmd/problems.hpp"
#include "odcmd/prox.hpp"
#include "odcmd/sets.hpp"

namespace odcmd {

using Json = nlohmann::json;

struct GeometryConfig {
  std::string map = "euclidean";  // euclidean | entropic | pnorm
  std::string p_rule = "fixed";   // fixed | ln_d
  double p = 2.0;
};

struct SetConfig {
  std::string kind = "ball";  // ball | simplex | free
  double radius = 1.0;
  std::optional<double> inner_radius;          // defaults to radius for balls
  std::optional<double> bound_radius_override;  // for bound evaluation on free sets
};

struct RegConfig {
  std::string kind = "l1";  // zero | l1 | elastic
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct NetworkConfig {
  std::string kind = "alternating_halves";  // alternating_halves | ring | complete | static_random
  int m = 1;
  std::uint64_t seed = 1;
  double edge_prob = 0.2;
};

struct StreamConfig {
  std::string kind = "regression";
  int d = 1;
  double lambda1 = 0.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
};

struct ScheduleConfig {
  std::string eta_rule = "c_over_sqrt_T";  // c_over_sqrt_T | c_over_d_sqrt_T | corollary2 | fixed
  double c_eta = 1.0;
  double eta = 0.0;
  std::string error_model = "exact";  // exact | perturb | fixed | fixed_T32 | capped
  double c_rho = 0.0;
  double rho = 0.0;
  std::string delta_rule = "one_over_sqrt_T";  // one_over_sqrt_T | fixed
  double delta = 0.0;
  std::string xi_rule = "delta_over_inner_radius";  // delta_over_inner_radius | fixed
  double xi = 0.0;
  double subgradient_tie = 0.0;
};

struct SweepAxis {
  std::string param;
  std::vector<Json> values;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string algorithm = "odcmd";  // odcmd | banodcmd | subgradient_baseline
  GeometryConfig geometry;
  SetConfig set;
  RegConfig regularizer;
  NetworkConfig network;
  StreamConfig stream;
  std::vector<long> horizons;
  ScheduleConfig schedules;
  std::vector<SweepAxis> sweep;
  std::uint64_t seed = 1;
  bool strict_feasibility = true;
  bool allow_numeric_prox = false;
  std::string output_prefix = "experiment";
};

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::string& where,
                         std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back(where + ": expected an object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      errors.push_back(where + ": unknown field '" + it.key() + "'");
}

template <typename T>
void get_to(const Json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

inline void get_opt(const Json& j, const char* key,
                    std::optional<double>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<double>();
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  std::vector<std::string> errors;
  detail::require_keys(
      j,
      {"name", "algorithm", "geometry", "set", "regularizer", "network",
       "stream", "horizons", "schedules", "sweep", "seed",
       "strict_feasibility", "allow_numeric_prox", "output_prefix"},
      "config", errors);

  ExperimentConfig c;
  detail::get_to(j, "name", c.name);
  detail::get_to(j, "algorithm", c.algorithm);
  if (j.contains("geometry")) {
    const Json& g = j.at("geometry");
    detail::require_keys(g, {"map", "p", "p_rule"}, "geometry", errors);
    detail::get_to(g, "map", c.geometry.map);
    detail::get_to(g, "p", c.geometry.p);
    detail::get_to(g, "p_rule", c.geometry.p_rule);
  }
  if (j.contains("set")) {
    const Json& s = j.at("set");
    detail::require_keys(
        s, {"kind", "radius", "inner_radius", "bound_radius_override"}, "set",
        errors);
    detail::get_to(s, "kind", c.set.kind);
    detail::get_to(s, "radius", c.set.radius);
    detail::get_opt(s, "inner_radius", c.set.inner_radius);
    detail::get_opt(s, "bound_radius_override", c.set.bound_radius_override);
  }
  if (j.contains("regularizer")) {
    const Json& r = j.at("regularizer");
    detail::require_keys(r, {"kind", "lambda1", "lambda2"}, "regularizer",
                         errors);
    detail::get_to(r, "kind", c.regularizer.kind);
    detail::get_to(r, "lambda1", c.regularizer.lambda1);
    detail::get_to(r, "lambda2", c.regularizer.lambda2);
  }
  if (j.contains("network")) {
    const Json& n = j.at("network");
    detail::require_keys(n, {"kind", "m", "seed", "edge_prob"}, "network",
                         errors);
    detail::get_to(n, "kind", c.network.kind);
    detail::get_to(n, "m", c.network.m);
    detail::get_to(n, "seed", c.network.seed);
    detail::get_to(n, "edge_prob", c.network.edge_prob);
  }
  if (j.contains("stream")) {
    const Json& s = j.at("stream");
    detail::require_keys(s, {"kind", "d", "lambda1", "noise_sd", "seed"},
                         "stream", errors);
    detail::get_to(s, "kind", c.stream.kind);
    detail::get_to(s, "d", c.stream.d);
    detail::get_to(s, "lambda1", c.stream.lambda1);
    detail::get_to(s, "noise_sd", c.stream.noise_sd);
    detail::get_to(s, "seed", c.stream.seed);
  }
  detail::get_to(j, "horizons", c.horizons);
  if (j.contains("schedules")) {
    const Json& s = j.at("schedules");
    detail::require_keys(s,
                         {"eta_rule", "c_eta", "eta", "error_model", "c_rho",
                          "rho", "delta_rule", "delta", "xi_rule", "xi",
                          "subgradient_tie"},
                         "schedules", errors);
    detail::get_to(s, "eta_rule", c.schedules.eta_rule);
    detail::get_to(s, "c_eta", c.schedules.c_eta);
    detail::get_to(s, "eta", c.schedules.eta);
    detail::get_to(s, "error_model", c.schedules.error_model);
    detail::get_to(s, "c_rho", c.schedules.c_rho);
    detail::get_to(s, "rho", c.schedules.rho);
    detail::get_to(s, "delta_rule", c.schedules.delta_rule);
    detail::get_to(s, "delta", c.schedules.delta);
    detail::get_to(s, "xi_rule", c.schedules.xi_rule);
    detail::get_to(s, "xi", c.schedules.xi);
    detail::get_to(s, "subgradient_tie", c.schedules.subgradient_tie);
  }
  if (j.contains("sweep")) {
    for (const Json& a : j.at("sweep")) {
      detail::require_keys(a, {"param", "values"}, "sweep axis", errors);
      SweepAxis axis;
      detail::get_to(a, "param", axis.param);
      if (a.contains("values"))
        for (const Json& v : a.at("values")) axis.values.push_back(v);
      c.sweep.push_back(std::move(axis));
    }
  }
  detail::get_to(j, "seed", c.seed);
  detail::get_to(j, "strict_feasibility", c.strict_feasibility);
  detail::get_to(j, "allow_numeric_prox", c.allow_numeric_prox);
  detail::get_to(j, "output_prefix", c.output_prefix);

  if (!errors.empty()) {
    std::string msg = "config has unknown fields:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

inline Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["algorithm"] = c.algorithm;
  j["geometry"] = {{"map", c.geometry.map},
                   {"p", c.geometry.p},
                   {"p_rule", c.geometry.p_rule}};
  Json set = {{"kind", c.set.kind}, {"radius", c.set.radius}};
  if (c.set.inner_radius) set["inner_radius"] = *c.set.inner_radius;
  if (c.set.bound_radius_override)
    set["bound_radius_override"] = *c.set.bound_radius_override;
  j["set"] = set;
  j["regularizer"] = {{"kind", c.regularizer.kind},
                      {"lambda1", c.regularizer.lambda1},
                      {"lambda2", c.regularizer.lambda2}};
  j["network"] = {{"kind", c.network.kind},
                  {"m", c.network.m},
                  {"seed", c.network.seed},
                  {"edge_prob", c.network.edge_prob}};
  j["stream"] = {{"kind", c.stream.kind},
                 {"d", c.stream.d},
                 {"lambda1", c.stream.lambda1},
                 {"noise_sd", c.stream.noise_sd},
                 {"seed", c.stream.seed}};
  j["horizons"] = c.horizons;
  j["schedules"] = {{"eta_rule", c.schedules.eta_rule},
                    {"c_eta", c.schedules.c_eta},
                    {"eta", c.schedules.eta},
                    {"error_model", c.schedules.error_model},
                    {"c_rho", c.schedules.c_rho},
                    {"rho", c.schedules.rho},
                    {"delta_rule", c.schedules.delta_rule},
                    {"delta", c.schedules.delta},
                    {"xi_rule", c.schedules.xi_rule},
                    {"xi", c.schedules.xi},
                    {"subgradient_tie", c.schedules.subgradient_tie}};
  Json sweep = Json::array();
  for (const auto& a : c.sweep)
    sweep.push_back({{"param", a.param}, {"values", a.values}});
  j["sweep"] = sweep;
  j["seed"] = c.seed;
  j["strict_feasibility"] = c.strict_feasibility;
  j["allow_numeric_prox"] = c.allow_numeric_prox;
  j["output_prefix"] = c.output_prefix;
  return j;
}

// --- resolution to concrete objects -------------------------------------

inline double resolve_p(const ExperimentConfig& c) {
  if (c.geometry.p_rule == "ln_d") {
    double ln_d = std::log(static_cast<double>(c.stream.d));
    return ln_d / (ln_d - 1.0);
  }
  return c.geometry.p;
}

inline MirrorMap make_map(const ExperimentConfig& c) {
  if (c.geometry.map == "euclidean") return MirrorMap::euclidean();
  if (c.geometry.map == "entropic") return MirrorMap::entropic();
  if (c.geometry.map == "pnorm") return MirrorMap::pnorm(resolve_p(c));
  throw std::invalid_argument("unknown mirror map '" + c.geometry.map + "'");
}

inline ConstraintSet make_set(const ExperimentConfig& c) {
  if (c.set.kind == "ball")
    return c.set.inner_radius
               ? ConstraintSet::ball(c.set.radius, *c.set.inner_radius)
               : ConstraintSet::ball(c.set.radius);
  if (c.set.kind == "free") return ConstraintSet::free_space();
  if (c.set.kind == "simplex") return ConstraintSet::simplex();
  throw std::invalid_argument("unknown set kind '" + c.set.kind + "'");
}

inline Regularizer make_reg(const ExperimentConfig& c) {
  if (c.regularizer.kind == "zero") return Regularizer::zero();
  if (c.regularizer.kind == "l1") return Regularizer::l1(c.regularizer.lambda2);
  if (c.regularizer.kind == "elastic")
    return Regularizer::elastic(c.regularizer.lambda1, c.regularizer.lambda2);
  throw std::invalid_argument("unknown regularizer kind '" +
                              c.regularizer.kind + "'");
}

inline NetworkSchedule make_network(const ExperimentConfig& c) {
  const auto& n = c.network;
  if (n.kind == "ring") return NetworkSchedule::ring(n.m);
  if (n.kind == "complete") return NetworkSchedule::complete(n.m);
  if (n.kind == "static_random")
    return NetworkSchedule::fixed(
        n.m, NetworkSchedule::erdos_renyi_connected(n.m, n.edge_prob, n.seed));
  if (n.kind == "alternating_halves")
    return NetworkSchedule::alternating_halves(
        n.m, NetworkSchedule::erdos_renyi_connected(n.m, n.edge_prob, n.seed),
        n.seed);
  throw std::invalid_argument("unknown network kind '" + n.kind + "'");
}

inline std::unique_ptr<RegressionStream> make_stream(const ExperimentConfig& c,
                                                     long T) {
  if (c.stream.kind != "regression")
    throw std::invalid_argument("unknown stream kind '" + c.stream.kind + "'");
  return std::make_unique<RegressionStream>(RegressionStream::generate(
      c.network.m, c.stream.d, T, c.stream.seed, c.stream.lambda1,
      c.stream.noise_sd));
}

inline double resolve_eta(const ExperimentConfig& c, long T) {
  const auto& s = c.schedules;
  double sqrt_t = std::sqrt(static_cast<double>(T));
  if (s.eta_rule == "c_over_sqrt_T") return s.c_eta / sqrt_t;
  if (s.eta_rule == "c_over_d_sqrt_T") return s.c_eta / (c.stream.d * sqrt_t);
  if (s.eta_rule == "corollary2") {
    LpNorm norm = make_map(c).norm();
    return 1.0 /
           (norm.pbar(c.stream.d) * norm.pbar_dual(c.stream.d) * c.stream.d *
            sqrt_t);
  }
  if (s.eta_rule == "fixed") return s.eta;
  throw std::invalid_argument("unknown eta rule '" + s.eta_rule + "'");
}

inline ErrorModel resolve_error_model(const ExperimentConfig& c, long T) {
  const auto& s = c.schedules;
  if (s.error_model == "exact") return ErrorModel::exact();
  if (s.error_model == "perturb") return ErrorModel::perturb(s.c_rho);
  if (s.error_model == "fixed") return ErrorModel::fixed(s.rho);
  if (s.error_model == "fixed_T32")
    return ErrorModel::fixed(s.c_rho / std::pow(static_cast<double>(T), 1.5));
  if (s.error_model == "capped") return ErrorModel::capped(s.c_rho);
  throw std::invalid_argument("unknown error model '" + s.error_model + "'");
}

inline AlgorithmConfig resolve_algorithm_config(const ExperimentConfig& c,
                                                long T) {
  AlgorithmConfig a;
  a.eta = resolve_eta(c, T);
  a.error = resolve_error_model(c, T);
  a.subgradient_tie = c.schedules.subgradient_tie;
  a.strict_feasibility = c.strict_feasibility;
  a.seed = c.seed;
  if (c.algorithm == "banodcmd") {
    double sqrt_t = std::sqrt(static_cast<double>(T));
    a.delta = c.schedules.delta_rule == "one_over_sqrt_T"
                  ? 1.0 / sqrt_t
                  : c.schedules.delta;
    a.xi = c.schedules.xi_rule == "delta_over_inner_radius"
               ? a.delta / make_set(c).inner_radius()
               : c.schedules.xi;
  }
  return a;
}

// Applies one sweep override; throws for unknown parameter paths.
inline void apply_override(ExperimentConfig& c, const std::string& param,
                           const Json& value) {
  if (param == "algorithm")
    c.algorithm = value.get<std::string>();
  else if (param == "map")
    c.geometry.map = value.get<std::string>();
  else if (param == "d")
    c.stream.d = value.get<int>();
  else if (param == "m")
    c.network.m = value.get<int>();
  else if (param == "c_rho")
    c.schedules.c_rho = value.get<double>();
  else if (param == "rho")
    c.schedules.rho = value.get<double>();
  else if (param == "c_eta")
    c.schedules.c_eta = value.get<double>();
  else if (param == "lambda1")
    c.stream.lambda1 = value.get<double>();
  else if (param == "lambda2")
    c.regularizer.lambda2 = value.get<double>();
  else if (param == "radius")
    c.set.radius = value.get<double>();
  else if (param == "error_variant") {
    // compact "kind" or "kind:value" spelling for sweeping error models
    std::string s = value.get<std::string>();
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon);
    double v = colon == std::string::npos ? 0.0 : std::stod(s.substr(colon + 1));
    if (kind == "exact") {
      c.schedules.error_model = "exact";
    } else if (kind == "perturb" || kind == "capped" || kind == "fixed_T32") {
      c.schedules.error_model = kind;
      c.schedules.c_rho = v;
    } else if (kind == "fixed") {
      c.schedules.error_model = "fixed";
      c.schedules.rho = v;
    } else {
      throw std::invalid_argument("unknown error variant '" + s + "'");
    }
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + param + "'");
  }
}

// Full validation; returns every violated constraint at once.
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  check(c.algorithm == "odcmd" || c.algorithm == "banodcmd" ||
            c.algorithm == "subgradient_baseline",
        "algorithm must be odcmd, banodcmd or subgradient_baseline");
  check(c.geometry.map == "euclidean" || c.geometry.map == "entropic" ||
            c.geometry.map == "pnorm",
        "geometry.map must be euclidean, entropic or pnorm");
  if (c.geometry.map == "pnorm") {
    check(c.geometry.p_rule == "fixed" || c.geometry.p_rule == "ln_d",
          "geometry.p_rule must be fixed or ln_d");
    if (c.geometry.p_rule == "fixed")
      check(c.geometry.p > 1.0 && c.geometry.p <= 2.0,
            "geometry.p must lie in (1,2]");
    else
      check(c.stream.d >= 8,
            "the ln_d exponent rule needs d >= 8 so that q = ln(d) >= 2");
  }
  check(c.set.kind == "ball" || c.set.kind == "simplex" || c.set.kind == "free",
        "set.kind must be ball, simplex or free");
  if (c.set.kind == "ball") {
    check(c.set.radius > 0.0, "set.radius must be positive");
    if (c.set.inner_radius)
      check(*c.set.inner_radius > 0.0 && *c.set.inner_radius <= c.set.radius,
            "set.inner_radius must lie in (0, radius]");
  }
  check(c.regularizer.kind == "zero" || c.regularizer.kind == "l1" ||
            c.regularizer.kind == "elastic",
        "regularizer.kind must be zero, l1 or elastic");
  check(c.regularizer.lambda1 >= 0.0 && c.regularizer.lambda2 >= 0.0,
        "regularizer weights must be nonnegative");
  check(c.network.m >= 1, "network.m must be >= 1");
  check(c.network.kind == "alternating_halves" || c.network.kind == "ring" ||
            c.network.kind == "complete" || c.network.kind == "static_random",
        "network.kind must be alternating_halves, ring, complete or "
        "static_random");
  if (c.network.kind == "alternating_halves" ||
      c.network.kind == "static_random")
    check(c.network.edge_prob > 0.0 && c.network.edge_prob <= 1.0,
          "network.edge_prob must lie in (0,1]");
  check(c.stream.kind == "regression", "stream.kind must be regression");
  check(c.stream.d >= 1, "stream.d must be >= 1");
  check(c.stream.lambda1 >= 0.0, "stream.lambda1 must be nonnegative");
  check(c.stream.noise_sd >= 0.0, "stream.noise_sd must be nonnegative");
  check(!c.horizons.empty(), "horizons must list at least one T");
  for (long T : c.horizons) check(T >= 1, "every horizon must be >= 1");
  check(c.schedules.subgradient_tie >= -1.0 && c.schedules.subgradient_tie <= 1.0,
        "schedules.subgradient_tie must lie in [-1,1]");

  // rule names resolve?
  if (!c.horizons.empty()) {
    try {
      resolve_eta(c, c.horizons.front());
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
    try {
      resolve_error_model(c, c.horizons.front());
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  }

  // geometry/set pairing must have a closed-form prox unless the numeric
  // fallback is explicitly allowed
  bool made_geometry = false;
  try {
    MirrorMap map = make_map(c);
    ConstraintSet set = make_set(c);
    Regularizer reg = make_reg(c);
    made_geometry = true;
    if (c.algorithm != "subgradient_baseline" && !c.allow_numeric_prox)
      check(prox_has_closed_form(map, set, reg),
            "no closed-form prox for (" + c.geometry.map + ", " + c.set.kind +
                ", " + c.regularizer.kind +
                ") and allow_numeric_prox is false");
  } catch (const std::exception& e) {
    if (!made_geometry) errors.emplace_back(e.what());
  }

  if (c.algorithm == "subgradient_baseline") {
    check(c.geometry.map == "euclidean",
          "the subgradient baseline requires euclidean geometry");
    check(c.set.kind == "ball", "the subgradient baseline requires a ball set");
  }
  if (c.algorithm == "banodcmd") {
    check(c.set.kind == "ball",
          "bandit feedback requires a ball set with positive inner radius");
    check(c.schedules.delta_rule == "one_over_sqrt_T" ||
              c.schedules.delta_rule == "fixed",
          "schedules.delta_rule must be one_over_sqrt_T or fixed");
    check(c.schedules.xi_rule == "delta_over_inner_radius" ||
              c.schedules.xi_rule == "fixed",
          "schedules.xi_rule must be delta_over_inner_radius or fixed");
    if (c.set.kind == "ball") {
      for (long T : c.horizons) {
        try {
          AlgorithmConfig a = resolve_algorithm_config(c, T);
          double inner = make_set(c).inner_radius();
          check(a.xi >= 0.0 && a.xi < 1.0,
                "bandit shrinkage must satisfy 0 <= xi < 1 (T=" +
                    std::to_string(T) + ")");
          check(a.delta > 0.0 && a.delta <= a.xi * inner,
                "bandit exploration must satisfy 0 < delta <= xi * R_lower "
                "(T=" + std::to_string(T) + ": delta=" + std::to_string(a.delta) +
                    ", xi*R_lower=" + std::to_string(a.xi * inner) + ")");
        } catch (const std::exception& e) {
          errors.emplace_back(e.what());
        }
      }
    }
  }

  // sweep parameters must exist: probe each override on a copy
  for (const auto& axis : c.sweep) {
    if (axis.values.empty())
      errors.push_back("sweep axis '" + axis.param + "' has no values");
    for (const auto& v : axis.values) {
      try {
        ExperimentConfig probe = c;
        apply_override(probe, axis.param, v);
      } catch (const std::exception& e) {
        errors.emplace_back(e.what());
        break;
      }
    }
  }
  return errors;
}

// In-repo presets replicating the experiment protocols.
inline Json preset(const std::string& name) {
  const Json base = {
      {"name", name},
      {"algorithm", "odcmd"},
      {"geometry", {{"map", "euclidean"}, {"p", 2.0}, {"p_rule", "fixed"}}},
      {"set", {{"kind", "ball"}, {"radius", 1.0}}},
      {"regularizer", {{"kind", "l1"}, {"lambda1", 0.0}, {"lambda2", 0.1}}},
      {"network",
       {{"kind", "alternating_halves"},
        {"m", 30},
        {"seed", 7001},
        {"edge_prob", 0.2}}},
      {"stream",
       {{"kind", "regression"},
        {"d", 10},
        {"lambda1", 1.0},
        {"noise_sd", 1.0},
        {"seed", 12001}}},
      {"horizons", {100, 200, 400, 800, 1600}},
      {"schedules",
       {{"eta_rule", "c_over_d_sqrt_T"},
        {"c_eta", 1.0},
        {"eta", 0.0},
        {"error_model", "perturb"},
        {"c_rho", 10.0},
        {"rho", 0.0},
        {"delta_rule", "one_over_sqrt_T"},
        {"delta", 0.0},
        {"xi_rule", "delta_over_inner_radius"},
        {"xi", 0.0},
        {"subgradient_tie", 0.0}}},
      {"seed", 424242},
      {"strict_feasibility", true},
      {"allow_numeric_prox", false},
      {"output_prefix", name},
  };

  Json j = base;
  if (name == "fig2") {
    j["sweep"] = Json::array(
        {{{"param", "algorithm"},
          {"values", {"odcmd", "subgradient_baseline"}}}});
    return j;
  }
  if (name == "fig3") {
    j["horizons"] = {100, 200, 400, 800, 1600, 2000};
    j["sweep"] = Json::array(
        {{{"param", "error_variant"},
          {"values",
           {"perturb:0", "perturb:10", "perturb:20", "perturb:30", "fixed:0.5",
            "fixed_T32:10"}}}});
    return j;
  }
  if (name == "fig4") {
    j["set"] = {{"kind", "free"}, {"radius", 1.0}};
    j["geometry"] = {{"map", "euclidean"}, {"p", 2.0}, {"p_rule", "ln_d"}};
    j["horizons"] = {100, 400, 1600};
    j["sweep"] = Json::array(
        {{{"param", "map"}, {"values", {"euclidean", "pnorm"}}},
         {{"param", "d"}, {"values", {10, 50, 100}}}});
    return j;
  }
  if (name == "fig5") {
    j["algorithm"] = "banodcmd";
    return j;
  }
  if (name == "fig6") {
    j["algorithm"] = "banodcmd";
    j["network"] = {{"kind", "ring"}, {"m", 10}, {"seed", 7001},
                    {"edge_prob", 0.2}};
    j["horizons"] = {100, 400, 1600};
    j["sweep"] =
        Json::array({{{"param", "m"}, {"values", {10, 20, 30}}}});
    return j;
  }
  if (name == "fig7") {
    j["algorithm"] = "banodcmd";
    j["horizons"] = {100, 400, 1600};
    j["sweep"] =
        Json::array({{{"param", "d"}, {"values", {10, 20, 30, 40}}}});
    return j;
  }
  throw std::invalid_argument("unknown preset '" + name +
                              "' (available: fig2..fig7)");
}

}  // namespace odcmd
