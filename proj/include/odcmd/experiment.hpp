#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "odcmd/config.hpp"
#include "odcmd/harness.hpp"

namespace odcmd {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_json_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  return v.dump();
}

// One run of one algorithm at one horizon with a certified comparator and
// the matching theorem bound (infinite when the realized constants are not
// finite, e.g. on an unbounded set without a radius override).
struct SingleRun {
  RunRecord record;
  ComparatorResult comparator;
  RegretReport report;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.0, delta = 0.0, xi = 0.0;
};

inline SingleRun run_single(const ExperimentConfig& c, long T) {
  MirrorMap map = make_map(c);
  ConstraintSet set = make_set(c);
  Regularizer reg = make_reg(c);
  NetworkSchedule net = make_network(c);
  auto stream = make_stream(c, T);
  AlgorithmConfig algo = resolve_algorithm_config(c, T);

  SingleRun out;
  out.eta = algo.eta;
  out.delta = algo.delta;
  out.xi = algo.xi;
  if (c.algorithm == "odcmd")
    out.record = run_odcmd(*stream, net, map, set, reg, algo, T,
                           c.set.bound_radius_override);
  else if (c.algorithm == "banodcmd")
    out.record = run_banodcmd(*stream, net, map, set, reg, algo, T,
                              c.set.bound_radius_override);
  else if (c.algorithm == "subgradient_baseline")
    out.record = run_subgradient_baseline(*stream, net, set, reg, algo, T);
  else
    throw std::invalid_argument("unknown algorithm '" + c.algorithm + "'");

  out.comparator = solve_comparator(*stream, set, reg);
  out.report = average_regret(out.record, *stream, reg, out.comparator);

  if (c.algorithm != "subgradient_baseline") {
    try {
      BoundInputs bi =
          bound_inputs_from_run(out.record, map, set, out.comparator.x_star);
      std::vector<double> rho = rho_schedule(algo.error, T);
      out.bound = c.algorithm == "banodcmd"
                      ? theorem2_bound(bi, T, algo.eta, rho, algo.delta, algo.xi)
                      : theorem1_bound(bi, T, algo.eta, rho);
    } catch (const std::exception&) {
      out.bound = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

struct CellResult {
  std::vector<std::pair<std::string, Json>> axes;
  long T = 0;
  SingleRun run;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::string csv;
  Json summary;
};

namespace detail {

inline void render_outputs(const ExperimentConfig& base,
                           ExperimentResult& result) {
  std::string csv = "# odcmd regret csv v1\n";
  for (const auto& axis : base.sweep) csv += axis.param + ",";
  csv += "T,node,avg_regret\n";
  Json cells = Json::array();
  for (const auto& cell : result.cells) {
    std::string prefix;
    Json axes = Json::object();
    for (const auto& [param, value] : cell.axes) {
      prefix += format_json_value(value) + ",";
      axes[param] = value;
    }
    for (int i = 0; i < cell.run.report.per_node.size(); ++i)
      csv += prefix + std::to_string(cell.T) + "," + std::to_string(i) + "," +
             format_double(cell.run.report.per_node[i]) + "\n";

    const RunRecord& rec = cell.run.record;
    Json jc;
    jc["axes"] = axes;
    jc["T"] = cell.T;
    jc["eta"] = cell.run.eta;
    if (cell.run.delta > 0.0) {
      jc["delta"] = cell.run.delta;
      jc["xi"] = cell.run.xi;
    }
    jc["max_avg_regret"] = cell.run.report.max;
    jc["min_avg_regret"] = cell.run.report.min;
    jc["comparator_gap"] = cell.run.report.comparator_gap;
    jc["theorem_bound"] =
        std::isfinite(cell.run.bound) ? Json(cell.run.bound) : Json(nullptr);
    jc["realized"] = {
        {"g_ell", std::isfinite(rec.g_ell) ? Json(rec.g_ell) : Json(nullptr)},
        {"g_r", rec.g_r},
        {"zeta", rec.zeta},
        {"window", rec.window},
        {"theta", rec.theta},
        {"kappa", rec.kappa}};
    jc["feasibility_violations"] = rec.feasibility_violations;
    cells.push_back(jc);
  }
  result.csv = std::move(csv);
  result.summary = Json{{"config", config_to_json(base)}, {"cells", cells}};
}

}  // namespace detail

// Runs the configured sweep: one seeded run per (cell, horizon), cells taken
// in deterministic cartesian order. Cells are independent and may execute on
// several threads; the rendered outputs do not depend on the thread count.
inline ExperimentResult run_experiment_config(const ExperimentConfig& base,
                                              int threads = 1) {
  {
    std::vector<std::string> errors = validate(base);
    if (!errors.empty()) {
      std::string msg = "invalid config:";
      for (const auto& e : errors) msg += "\n  - " + e;
      throw std::invalid_argument(msg);
    }
  }

  // cartesian enumeration of sweep cells
  std::vector<std::vector<Json>> tuples{{}};
  for (const auto& axis : base.sweep) {
    std::vector<std::vector<Json>> next;
    for (const auto& t : tuples)
      for (const auto& v : axis.values) {
        auto e = t;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    tuples = std::move(next);
  }

  ExperimentResult result;
  std::vector<ExperimentConfig> cell_configs;
  for (const auto& tuple : tuples) {
    ExperimentConfig cc = base;
    CellResult cell;
    for (std::size_t a = 0; a < base.sweep.size(); ++a) {
      apply_override(cc, base.sweep[a].param, tuple[a]);
      cell.axes.emplace_back(base.sweep[a].param, tuple[a]);
    }
    std::vector<std::string> errors = validate(cc);
    if (!errors.empty()) {
      std::string msg = "invalid sweep cell:";
      for (const auto& e : errors) msg += "\n  - " + e;
      throw std::invalid_argument(msg);
    }
    for (long T : cc.horizons) {
      CellResult ct = cell;
      ct.T = T;
      result.cells.push_back(std::move(ct));
      cell_configs.push_back(cc);
    }
  }

  auto work = [&](std::size_t idx) {
    result.cells[idx].run = run_single(cell_configs[idx], result.cells[idx].T);
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < result.cells.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= result.cells.size()) return;
          try {
            work(i);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            failed = true;
            if (error_message.empty()) error_message = e.what();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error(error_message);
  }

  detail::render_outputs(base, result);
  return result;
}

// Writes <prefix>_regret.csv and <prefix>_summary.json under out_dir; files
// are written only after every cell has completed.
inline void write_outputs(const ExperimentResult& result,
                          const ExperimentConfig& base,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream os(fs::path(out_dir) / (base.output_prefix + "_regret.csv"),
                     std::ios::binary);
    if (!os) throw std::runtime_error("cannot write CSV under " + out_dir);
    os << result.csv;
  }
  {
    std::ofstream os(fs::path(out_dir) / (base.output_prefix + "_summary.json"),
                     std::ios::binary);
    if (!os) throw std::runtime_error("cannot write summary under " + out_dir);
    os << result.summary.dump(2) << "\n";
  }
}

struct CheckReport {
  bool ok = false;
  std::vector<std::string> errors;
  Assumption1Report network;
  std::string text;
};

// Dry-run validation: config constraints plus the network assumption report
// on the generated schedule, without running the optimizer.
inline CheckReport check_config(const ExperimentConfig& c) {
  CheckReport rep;
  rep.errors = validate(c);
  if (!rep.errors.empty()) {
    rep.text = "config validation failed:\n";
    for (const auto& e : rep.errors) rep.text += "  - " + e + "\n";
    return rep;
  }
  NetworkSchedule net = make_network(c);
  long horizon = 0;
  for (long T : c.horizons) horizon = std::max(horizon, T);
  rep.network = verify_assumption1(net, std::min<long>(horizon, 1000));
  if (!rep.network.ok) {
    rep.text = "network assumption check failed: " + rep.network.message + "\n";
    return rep;
  }
  rep.ok = true;
  rep.text = "config ok\n";
  rep.text += "  network: m=" + std::to_string(c.network.m) +
              " zeta=" + format_double(rep.network.realized_zeta) +
              " B=" + std::to_string(rep.network.realized_window) +
              " stochasticity_dev=" +
              format_double(rep.network.max_stochasticity_deviation) + "\n";
  for (long T : c.horizons) {
    AlgorithmConfig a = resolve_algorithm_config(c, T);
    rep.text += "  T=" + std::to_string(T) + ": eta=" + format_double(a.eta);
    if (c.algorithm == "banodcmd")
      rep.text += " delta=" + format_double(a.delta) +
                  " xi=" + format_double(a.xi);
    rep.text += "\n";
  }
  return rep;
}

}  // namespace odcmd
