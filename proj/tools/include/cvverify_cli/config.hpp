#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvverify/protocol.hpp"

namespace cvv::cli {

using Json = nlohmann::ordered_json;

struct EstimateKnobs {
  std::optional<std::int64_t> trials;  // overrides the planned N
  bool trace = false;                  // write the per-trial CSV
};

struct TeleportKnobs {
  std::optional<double> gamma;   // defaults to gamma_list[0]
  std::optional<double> x_meas;  // sampled from the ancilla marginal when unset
};

struct SweepKnobs {
  std::string kind = "shipped";  // "shipped" or an adversary kind name
  std::vector<double> values;    // parameter grid for parameterized kinds
  int runs = 100;
};

struct RunConfig {
  ProtocolParams protocol;
  AdversarySpec adversary;
  EstimateKnobs estimate;
  TeleportKnobs teleport;
  int runs = 1;  // protocol-run
  SweepKnobs sweep;
  std::string output_dir;

  /// Adversaries covered by adversary-sweep.
  std::vector<AdversarySpec> sweep_adversaries() const;
  /// Every field with defaults resolved, in schema order.
  Json to_json() const;
};

/// Strict parse: unknown keys and wrong types raise ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);

/// Applies "a.b.c=value" to `doc`; the value is parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Reads a JSON config file (or starts from {} when `path` is empty) and applies overrides.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace cvv::cli
