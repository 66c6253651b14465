#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvverify/errors.hpp"
#include "cvverify/parallel.hpp"
#include "cvverify_cli/commands.hpp"

namespace {

const char* describe(const std::string& cmd) {
  if (cmd == "witness-eval") return "Exact witness value and per-term table for the configured state";
  if (cmd == "estimate") return "Importance-sampled witness estimate from simulated homodyne data";
  if (cmd == "complexity") return "Number of copies required for the configured (eta, beta)";
  if (cmd == "teleport") return "One run of the cubic-gate injection circuit";
  if (cmd == "protocol-run") return "End-to-end protocol runs against the configured adversary";
  return "Verifiability Monte Carlo over a grid of adversaries";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cvv::cli;
  CLI::App app{"cvverify: verification of cubic-phase resource states"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int workers = 1;
  bool print = false;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override a config key, e.g. --set eta=0.04 --set adversary.kind=vacuum");
    sub->add_option("-o,--out", out_dir, "Output directory (default: $CVVERIFY_OUT_DIR or .)");
    sub->add_option("-j,--workers", workers, "Worker threads; 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
    sub->add_flag("--print", print, "Also print the JSON report to stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (workers == 0) workers = cvv::default_workers();

  CommandOutput out;
  std::string config_dir;
  try {
    const RunConfig cfg = load_config(config_path, overrides);
    config_dir = cfg.output_dir;
    out = execute(command, cfg, workers);
  } catch (const cvv::Error& e) {
    out = config_failure(command, e.what());
  }

  const std::string dir = resolve_output_dir(out_dir, config_dir);
  try {
    write_outputs(out, command, dir);
  } catch (const std::exception& e) {
    std::cerr << "cvverify: " << e.what() << '\n';
    return kExitConfig;
  }
  if (print) std::cout << out.report.dump(2) << '\n';
  if (out.exit_code != kExitOk) {
    std::cerr << "cvverify " << command << ": " << out.report["status"].get<std::string>() << ": "
              << out.report["error"]["message"].get<std::string>() << '\n';
  }
  return out.exit_code;
}
