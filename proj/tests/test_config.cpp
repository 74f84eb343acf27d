#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "odcmd/config.hpp"
#include "odcmd/experiment.hpp"

using namespace odcmd;

namespace {

bool mentions(const std::vector<std::string>& errors, const std::string& what) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
    return e.find(what) != std::string::npos;
  });
}

ExperimentConfig tiny_config() {
  ExperimentConfig c = config_from_json(preset("fig2"));
  c.network.m = 4;
  c.horizons = {20, 40};
  c.sweep.clear();
  return c;
}

}  // namespace

TEST(Config, RoundTripIsIdentity) {
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}) {
    Json j = preset(name);
    ExperimentConfig c = config_from_json(j);
    Json j2 = config_to_json(c);
    ExperimentConfig c2 = config_from_json(j2);
    EXPECT_EQ(j2, config_to_json(c2)) << name;
  }
}

TEST(Config, PresetsValidate) {
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}) {
    ExperimentConfig c = config_from_json(preset(name));
    std::vector<std::string> errors = validate(c);
    EXPECT_TRUE(errors.empty()) << name << ": " << errors.front();
  }
  EXPECT_THROW(preset("fig9"), std::invalid_argument);
}

TEST(Config, UnknownFieldsRejected) {
  Json j = preset("fig2");
  j["unknown_top_level"] = 1;
  j["schedules"]["bogus"] = 2;
  try {
    config_from_json(j);
    FAIL() << "unknown fields were accepted";
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("unknown_top_level"), std::string::npos);
    EXPECT_NE(msg.find("bogus"), std::string::npos);
  }
}

TEST(Config, ValidationListsEveryViolation) {
  ExperimentConfig c = config_from_json(preset("fig2"));
  c.algorithm = "nonsense";
  c.stream.d = 0;
  c.regularizer.lambda2 = -1.0;
  c.horizons.clear();
  std::vector<std::string> errors = validate(c);
  EXPECT_GE(errors.size(), 4u);
  EXPECT_TRUE(mentions(errors, "algorithm"));
  EXPECT_TRUE(mentions(errors, "stream.d"));
  EXPECT_TRUE(mentions(errors, "nonnegative"));
  EXPECT_TRUE(mentions(errors, "horizons"));
}

TEST(Config, BanditShrinkageConstraintNamed) {
  ExperimentConfig c = config_from_json(preset("fig5"));
  c.schedules.delta_rule = "fixed";
  c.schedules.delta = 0.5;
  c.schedules.xi_rule = "fixed";
  c.schedules.xi = 0.1;  // delta > xi * R_lower
  std::vector<std::string> errors = validate(c);
  EXPECT_TRUE(mentions(errors, "delta <= xi * R_lower"));
}

TEST(Config, EntropicBallPairingRejected) {
  ExperimentConfig c = config_from_json(preset("fig2"));
  c.geometry.map = "entropic";
  std::vector<std::string> errors = validate(c);
  EXPECT_TRUE(mentions(errors, "closed-form prox"));
  c.allow_numeric_prox = true;
  // still invalid: entropic initialization needs the simplex
  EXPECT_FALSE(validate(c).empty() && c.set.kind == "ball");
}

TEST(Config, EtaResolutionRules) {
  ExperimentConfig c = config_from_json(preset("fig2"));
  c.schedules.eta_rule = "c_over_sqrt_T";
  c.schedules.c_eta = 2.0;
  EXPECT_NEAR(resolve_eta(c, 400), 0.1, 1e-15);
  c.schedules.eta_rule = "c_over_d_sqrt_T";
  c.schedules.c_eta = 1.0;
  EXPECT_NEAR(resolve_eta(c, 400), 1.0 / (10.0 * 20.0), 1e-15);
  c.schedules.eta_rule = "fixed";
  c.schedules.eta = 0.05;
  EXPECT_EQ(resolve_eta(c, 123), 0.05);
}

TEST(Config, ErrorModelResolution) {
  ExperimentConfig c = config_from_json(preset("fig3"));
  apply_override(c, "error_variant", "fixed_T32:10");
  ErrorModel m = resolve_error_model(c, 2000);
  EXPECT_EQ(m.kind, ErrorModelKind::kFixed);
  EXPECT_NEAR(m.rho, 10.0 / std::pow(2000.0, 1.5), 1e-18);

  apply_override(c, "error_variant", "perturb:20");
  m = resolve_error_model(c, 100);
  EXPECT_EQ(m.kind, ErrorModelKind::kPerturb);
  EXPECT_EQ(m.c_rho, 20.0);

  apply_override(c, "error_variant", "exact");
  EXPECT_EQ(resolve_error_model(c, 100).kind, ErrorModelKind::kExact);

  EXPECT_THROW(apply_override(c, "error_variant", "wibble:3"),
               std::invalid_argument);
  EXPECT_THROW(apply_override(c, "no_such_param", 1.0), std::invalid_argument);
}

TEST(Config, BanditScheduleResolution) {
  ExperimentConfig c = config_from_json(preset("fig5"));
  AlgorithmConfig a = resolve_algorithm_config(c, 1600);
  EXPECT_NEAR(a.delta, 1.0 / 40.0, 1e-15);
  EXPECT_NEAR(a.xi, a.delta / 1.0, 1e-15);
  EXPECT_NEAR(a.eta, 1.0 / (10.0 * 40.0), 1e-15);
}

TEST(Experiment, CheckReportsNetworkAssumptions) {
  ExperimentConfig c = tiny_config();
  CheckReport rep = check_config(c);
  EXPECT_TRUE(rep.ok) << rep.text;
  EXPECT_EQ(rep.network.realized_window, 2);
  EXPECT_LT(rep.network.max_stochasticity_deviation, 1e-12);
}

TEST(Experiment, CheckFailsOnBadConfig) {
  ExperimentConfig c = tiny_config();
  c.schedules.eta_rule = "warp_drive";
  CheckReport rep = check_config(c);
  EXPECT_FALSE(rep.ok);
  EXPECT_NE(rep.text.find("eta rule"), std::string::npos);
}

TEST(Experiment, SweepRunsCellsInDeterministicOrder) {
  ExperimentConfig c = tiny_config();
  c.horizons = {20};
  c.sweep.push_back(SweepAxis{"c_rho", {Json(0.0), Json(5.0)}});
  ExperimentResult r = run_experiment_config(c, 1);
  ASSERT_EQ(r.cells.size(), 2u);
  EXPECT_EQ(r.cells[0].axes[0].second.get<double>(), 0.0);
  EXPECT_EQ(r.cells[1].axes[0].second.get<double>(), 5.0);
  // error injection can only hurt
  EXPECT_LE(r.cells[0].run.report.max, r.cells[1].run.report.max + 1e-9);
}

TEST(Experiment, RerunYieldsByteIdenticalCsv) {
  ExperimentConfig c = tiny_config();
  c.sweep.push_back(SweepAxis{"algorithm",
                              {Json("odcmd"), Json("subgradient_baseline")}});
  ExperimentResult a = run_experiment_config(c, 1);
  ExperimentResult b = run_experiment_config(c, 2);  // thread count irrelevant
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  EXPECT_NE(a.csv.find("# odcmd regret csv v1"), std::string::npos);
}

TEST(Experiment, TheoremBoundDominatesInSummary) {
  ExperimentConfig c = tiny_config();
  c.schedules.error_model = "exact";
  ExperimentResult r = run_experiment_config(c, 1);
  for (const auto& cell : r.cells) {
    ASSERT_TRUE(std::isfinite(cell.run.bound));
    EXPECT_LE(cell.run.report.max, cell.run.bound);
  }
}
