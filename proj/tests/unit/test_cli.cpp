#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cvverify/errors.hpp"
#include "cvverify_cli/commands.hpp"
#include "cvverify_cli/config.hpp"

using namespace cvv;
using namespace cvv::cli;
using nlohmann::json;

namespace {

json minimal() { return json::parse(R"({"M":1,"gamma_tilde":0.1,"s":1.0,"F_T":0.9,"beta":0.05,"eta":0.05,"seed":7})"); }

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalResolvesDefaults) {
  const RunConfig c = parse_config(minimal());
  EXPECT_EQ(c.protocol.dimension, 40);
  EXPECT_EQ(c.protocol.gamma_list, std::vector<double>{0.1});
  EXPECT_EQ(c.protocol.seed, 7u);
  const Json echoed = c.to_json();
  EXPECT_EQ(echoed["D"], 40);
  EXPECT_EQ(echoed["adversary"]["kind"], "honest");
  EXPECT_FALSE(echoed.contains("workers"));
}

TEST(Config, EtaConstraintNamed) {
  json d = minimal();
  d["eta"] = 0.06;
  const std::string msg = error_of(d);
  EXPECT_NE(msg.find("eta <= (1 - F_T)/2"), std::string::npos) << msg;
}

TEST(Config, UnknownKeysRejected) {
  json d = minimal();
  d["gamma"] = 0.1;
  EXPECT_NE(error_of(d).find("unknown key 'gamma'"), std::string::npos);
  d = minimal();
  d["adversary"] = {{"kind", "vacuum"}, {"weight", 0.1}};
  EXPECT_NE(error_of(d).find("adversary.weight"), std::string::npos);
}

TEST(Config, TypeErrorsNameTheField) {
  json d = minimal();
  d["D"] = "forty";
  EXPECT_NE(error_of(d).find("'D'"), std::string::npos);
  d = minimal();
  d["seed"] = -1;
  EXPECT_NE(error_of(d).find("'seed'"), std::string::npos);
}

TEST(Config, OverridesParseJsonOrString) {
  json d = minimal();
  apply_override(d, "adversary.kind=orthogonal_mix");
  apply_override(d, "adversary.parameter=0.3");
  apply_override(d, "gamma_list=[0.2]");
  const RunConfig c = parse_config(d);
  EXPECT_EQ(c.adversary.kind, AdversaryKind::kOrthogonalMix);
  EXPECT_EQ(c.adversary.parameter, 0.3);
  EXPECT_EQ(c.protocol.gamma_list, std::vector<double>{0.2});
  EXPECT_THROW(apply_override(d, "novalue"), ConfigError);
}

TEST(Config, SweepNeedsValuesForParameterizedKinds) {
  json d = minimal();
  d["sweep"] = {{"kind", "orthogonal_mix"}};
  EXPECT_NE(error_of(d).find("sweep.values"), std::string::npos);
  d["sweep"]["runs"] = 50;
  d["sweep"]["values"] = {0.1};
  EXPECT_NE(error_of(d).find("sweep.runs"), std::string::npos);
}

TEST(Commands, ComplexityEchoesFormulaInputs) {
  json d = minimal();
  d["beta"] = 0.01;
  const CommandOutput out = execute("complexity", parse_config(d), 1);
  ASSERT_EQ(out.exit_code, kExitOk);
  const Json& r = out.report["result"];
  EXPECT_EQ(r["N"], 522050);
  EXPECT_EQ(r["copies"], 522051);
  EXPECT_EQ(r["inputs"]["beta"], 0.01);
  EXPECT_EQ(r["inputs"]["eta"], 0.05);
  EXPECT_EQ(r["inputs"]["moment_source"], "honest_state");
  EXPECT_EQ(out.report["version"], version());
  EXPECT_TRUE(out.report["diagnostics"]["gate_passed"].get<bool>());
}

TEST(Commands, WitnessEvalHonest) {
  const CommandOutput out = execute("witness-eval", parse_config(minimal()), 1);
  ASSERT_EQ(out.exit_code, kExitOk);
  EXPECT_NEAR(out.report["result"]["f_low"].get<double>(), 1.0, 5e-7);
  EXPECT_EQ(out.report["result"]["terms"].size(), 6u);
  ASSERT_EQ(out.csv.size(), 1u);
  EXPECT_EQ(std::count(out.csv[0].content.begin(), out.csv[0].content.end(), '\n'), 7);
}

TEST(Commands, SweepCsvFidelityDecreasing) {
  json d = minimal();
  d["F_T"] = 0.8;
  d["eta"] = 0.1;
  d["sweep"] = {{"kind", "orthogonal_mix"}, {"values", {0.05, 0.15, 0.3, 0.5}}, {"runs", 100}};
  const CommandOutput out = execute("adversary-sweep", parse_config(d), 1);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto& summary = out.csv.at(0);
  ASSERT_EQ(summary.name, "sweep_summary.csv");
  std::istringstream in(summary.content);
  std::string line;
  std::getline(in, line);
  double prev = 2;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const double f = std::stod(cells.at(3));
    EXPECT_LT(f, prev);
    prev = f;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(std::count(out.csv.at(1).content.begin(), out.csv.at(1).content.end(), '\n'), 401);
}

TEST(Commands, TruncationFailureExitsTwo) {
  json d = minimal();
  d["gamma_tilde"] = 0.2;
  d["s"] = 1.5;
  const CommandOutput out = execute("witness-eval", parse_config(d), 1);
  EXPECT_EQ(out.exit_code, kExitConvergence);
  EXPECT_EQ(out.report["status"], "truncation_failure");
  EXPECT_TRUE(out.report.contains("diagnostics"));
}

TEST(Commands, TeleportFixedBranch) {
  json d = minimal();
  d["teleport"] = {{"x_meas", 0.0}};
  const CommandOutput out = execute("teleport", parse_config(d), 1);
  ASSERT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(out.report["result"]["x_meas_source"], "fixed");
  EXPECT_GE(out.report["result"]["injection"]["fidelity_to_target"].get<double>(), 0.999);
}

TEST(Commands, ReportsIdenticalAcrossWorkers) {
  json d = minimal();
  d["runs"] = 3;
  d["adversary"] = {{"kind", "thermal_mix"}, {"parameter", 0.1}};
  const RunConfig c = parse_config(d);
  const CommandOutput a = execute("protocol-run", c, 1);
  const CommandOutput b = execute("protocol-run", c, 4);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_EQ(a.csv.at(0).content, b.csv.at(0).content);
}

TEST(Output, DirectoryPrecedence) {
  ::setenv("CVVERIFY_OUT_DIR", "/tmp/from-env", 1);
  EXPECT_EQ(resolve_output_dir("flag", "cfg"), "flag");
  EXPECT_EQ(resolve_output_dir("", "cfg"), "cfg");
  EXPECT_EQ(resolve_output_dir("", ""), "/tmp/from-env");
  ::unsetenv("CVVERIFY_OUT_DIR");
  EXPECT_EQ(resolve_output_dir("", ""), ".");
}

TEST(Output, WritesReportAndCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "cvverify_cli_test";
  std::filesystem::remove_all(dir);
  const CommandOutput out = execute("witness-eval", parse_config(minimal()), 1);
  write_outputs(out, "witness-eval", dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "witness-eval.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "witness_terms.csv"));
  std::filesystem::remove_all(dir);
}
