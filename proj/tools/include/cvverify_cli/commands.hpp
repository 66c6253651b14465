#pragma once

#include <string>
#include <vector>

#include "cvverify_cli/config.hpp"

namespace cvv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitConvergence = 2;

struct CsvFile {
  std::string name;
  std::string content;
};

struct CommandOutput {
  int exit_code = kExitOk;
  Json report;
  std::vector<CsvFile> csv;
};

const std::vector<std::string>& command_names();
bool is_command(const std::string& name);

std::string version();

/// Runs one command and builds its report and CSV streams in memory.
/// `workers` only affects wall time; outputs are identical for any value.
CommandOutput execute(const std::string& command, const RunConfig& cfg, int workers);

/// Report for a failure before a config could be resolved.
CommandOutput config_failure(const std::string& command, const std::string& message);

/// Precedence: explicit flag, config output_dir, $CVVERIFY_OUT_DIR, then ".".
std::string resolve_output_dir(const std::string& flag, const std::string& from_config);

/// Writes <command>.json and the CSV files into `dir` (created if missing).
void write_outputs(const CommandOutput& out, const std::string& command, const std::string& dir);

/// Honest-state tail masses and F_low on a truncation ladder, plus the
/// injection-side tail masses.
Json truncation_diagnostics(const ProtocolParams& params);

}  // namespace cvv::cli
