// Experiment runner for the distributed online composite mirror descent
// simulator. Loads a JSON config (or one of the in-repo presets fig2..fig7),
// validates it, runs the configured sweep and writes plot-ready CSV plus a
// JSON summary.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "odcmd/experiment.hpp"

namespace {

odcmd::ExperimentConfig load_config(const std::string& config_path,
                                    const std::string& preset_name) {
  odcmd::Json j;
  if (!preset_name.empty()) {
    j = odcmd::preset(preset_name);
  } else {
    std::ifstream is(config_path);
    if (!is)
      throw std::runtime_error("cannot read config file " + config_path);
    is >> j;
  }
  return odcmd::config_from_json(j);
}

std::string default_out_dir() {
  const char* env = std::getenv("ODCMD_OUT_DIR");
  return env ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed online composite mirror descent simulator"};
  app.require_subcommand(1);

  std::string config_path, preset_name;
  std::string out_dir = default_out_dir();
  std::uint64_t seed = 0;
  bool seed_set = false, strict = false;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "path to a JSON config file");
    cmd->add_option("-p,--preset", preset_name,
                    "built-in preset name (fig2..fig7)");
    cmd->add_option("--seed", seed, "override the master seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_flag("--strict", strict,
                  "fail hard on any feasibility violation");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run);
  run->add_option("-o,--out", out_dir,
                  "output directory (default: $ODCMD_OUT_DIR or ./out)");
  run->add_option("-t,--threads", threads, "worker threads for sweep cells");

  CLI::App* check =
      app.add_subcommand("check", "validate a config without running it");
  add_common(check);

  CLI::App* presets =
      app.add_subcommand("presets", "print a preset config as JSON");
  std::string dump_name;
  presets->add_option("name", dump_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      std::cout << odcmd::preset(dump_name).dump(2) << "\n";
      return 0;
    }
    if (config_path.empty() == preset_name.empty()) {
      std::cerr << "error: give exactly one of --config or --preset\n";
      return 2;
    }
    odcmd::ExperimentConfig cfg = load_config(config_path, preset_name);
    if (seed_set) cfg.seed = seed;
    if (strict) cfg.strict_feasibility = true;

    if (check->parsed()) {
      odcmd::CheckReport rep = odcmd::check_config(cfg);
      std::cout << rep.text;
      return rep.ok ? 0 : 1;
    }

    odcmd::ExperimentResult result =
        odcmd::run_experiment_config(cfg, threads);
    odcmd::write_outputs(result, cfg, out_dir);
    std::cout << "wrote " << out_dir << "/" << cfg.output_prefix
              << "_regret.csv (" << result.cells.size() << " runs)\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
