#include "cvverify_cli/config.hpp"

#include <fstream>
#include <set>

#include "cvverify/errors.hpp"

namespace cvv::cli {
namespace {

using nlohmann::json;

std::string field(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("field '" + (prefix.empty() ? "<root>" : prefix) + "': expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + field(prefix, key) + "'");
  }
}

double get_number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("field '" + name + "': expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError("field '" + name + "': expected an integer");
  return v.get<std::int64_t>();
}

int get_int(const json& v, const std::string& name) {
  const std::int64_t x = get_integer(v, name);
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError("field '" + name + "': out of range");
  return static_cast<int>(x);
}

bool get_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError("field '" + name + "': expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError("field '" + name + "': expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("field '" + name + "': expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename F>
void with(const json& obj, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it);
}

}  // namespace

std::vector<AdversarySpec> RunConfig::sweep_adversaries() const {
  if (sweep.kind == "shipped") return shipped_adversaries();
  const AdversaryKind kind = adversary_kind_from_string(sweep.kind);
  AdversarySpec base{kind, 0.0};
  if (!base.has_parameter()) return {base};
  std::vector<AdversarySpec> out;
  for (double v : sweep.values) out.push_back({kind, v});
  return out;
}

Json RunConfig::to_json() const {
  const ProtocolParams& p = protocol;
  Json j;
  j["M"] = p.copies;
  j["gamma_tilde"] = p.gamma_tilde;
  j["s"] = p.s;
  j["gamma_list"] = p.gamma_list;
  j["F_T"] = p.threshold_fidelity;
  j["beta"] = p.beta;
  j["eta"] = p.eta;
  j["D"] = p.dimension;
  j["injection_D"] = p.injection_dimension;
  j["tail_tolerance"] = p.tail_tolerance;
  j["injection_tail_tolerance"] = p.injection_tail_tolerance;
  j["seed"] = p.seed;
  j["input"] = {{"width", p.input.width}, {"center", p.input.center}, {"momentum", p.input.momentum}};
  j["moment_bound"] = p.moment_bound ? Json(*p.moment_bound) : Json(nullptr);
  j["adversary"] = {{"kind", to_string(adversary.kind)}, {"parameter", adversary.parameter}};
  j["estimate"] = {{"trials", estimate.trials ? Json(*estimate.trials) : Json(nullptr)}, {"trace", estimate.trace}};
  j["teleport"] = {{"gamma", teleport.gamma ? Json(*teleport.gamma) : Json(nullptr)},
                   {"x_meas", teleport.x_meas ? Json(*teleport.x_meas) : Json(nullptr)}};
  j["runs"] = runs;
  j["sweep"] = {{"kind", sweep.kind}, {"values", sweep.values}, {"runs", sweep.runs}};
  return j;
}

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, "",
                 {"M", "gamma_tilde", "s", "gamma_list", "F_T", "beta", "eta", "D", "injection_D", "tail_tolerance",
                  "injection_tail_tolerance", "seed", "input", "moment_bound", "adversary", "estimate", "teleport",
                  "runs", "sweep", "output_dir"});
  RunConfig cfg;
  ProtocolParams& p = cfg.protocol;
  with(doc, "M", [&](const json& v) { p.copies = get_int(v, "M"); });
  with(doc, "gamma_tilde", [&](const json& v) { p.gamma_tilde = get_number(v, "gamma_tilde"); });
  with(doc, "s", [&](const json& v) { p.s = get_number(v, "s"); });
  if (auto it = doc.find("gamma_list"); it != doc.end()) {
    p.gamma_list = get_numbers(*it, "gamma_list");
  } else {
    p.gamma_list.assign(static_cast<std::size_t>(std::max(p.copies, 0)), p.gamma_tilde);
  }
  with(doc, "F_T", [&](const json& v) { p.threshold_fidelity = get_number(v, "F_T"); });
  with(doc, "beta", [&](const json& v) { p.beta = get_number(v, "beta"); });
  with(doc, "eta", [&](const json& v) { p.eta = get_number(v, "eta"); });
  with(doc, "D", [&](const json& v) { p.dimension = get_int(v, "D"); });
  with(doc, "injection_D", [&](const json& v) { p.injection_dimension = get_int(v, "injection_D"); });
  with(doc, "tail_tolerance", [&](const json& v) { p.tail_tolerance = get_number(v, "tail_tolerance"); });
  with(doc, "injection_tail_tolerance",
       [&](const json& v) { p.injection_tail_tolerance = get_number(v, "injection_tail_tolerance"); });
  with(doc, "seed", [&](const json& v) {
    if (!v.is_number_unsigned()) throw ConfigError("field 'seed': expected a non-negative integer");
    p.seed = v.get<std::uint64_t>();
  });
  with(doc, "input", [&](const json& v) {
    reject_unknown(v, "input", {"width", "center", "momentum"});
    with(v, "width", [&](const json& x) { p.input.width = get_number(x, "input.width"); });
    with(v, "center", [&](const json& x) { p.input.center = get_number(x, "input.center"); });
    with(v, "momentum", [&](const json& x) { p.input.momentum = get_number(x, "input.momentum"); });
  });
  with(doc, "moment_bound", [&](const json& v) {
    if (!v.is_null()) p.moment_bound = get_number(v, "moment_bound");
  });
  with(doc, "adversary", [&](const json& v) {
    reject_unknown(v, "adversary", {"kind", "parameter"});
    with(v, "kind", [&](const json& x) { cfg.adversary.kind = adversary_kind_from_string(get_string(x, "adversary.kind")); });
    with(v, "parameter", [&](const json& x) { cfg.adversary.parameter = get_number(x, "adversary.parameter"); });
  });
  with(doc, "estimate", [&](const json& v) {
    reject_unknown(v, "estimate", {"trials", "trace"});
    with(v, "trials", [&](const json& x) {
      if (x.is_null()) return;
      cfg.estimate.trials = get_integer(x, "estimate.trials");
      if (*cfg.estimate.trials < 1) throw ConfigError("field 'estimate.trials': must be positive");
    });
    with(v, "trace", [&](const json& x) { cfg.estimate.trace = get_bool(x, "estimate.trace"); });
  });
  with(doc, "teleport", [&](const json& v) {
    reject_unknown(v, "teleport", {"gamma", "x_meas"});
    with(v, "gamma", [&](const json& x) {
      if (!x.is_null()) cfg.teleport.gamma = get_number(x, "teleport.gamma");
    });
    with(v, "x_meas", [&](const json& x) {
      if (!x.is_null()) cfg.teleport.x_meas = get_number(x, "teleport.x_meas");
    });
  });
  with(doc, "runs", [&](const json& v) {
    cfg.runs = get_int(v, "runs");
    if (cfg.runs < 1) throw ConfigError("field 'runs': must be positive");
  });
  with(doc, "sweep", [&](const json& v) {
    reject_unknown(v, "sweep", {"kind", "values", "runs"});
    with(v, "kind", [&](const json& x) { cfg.sweep.kind = get_string(x, "sweep.kind"); });
    with(v, "values", [&](const json& x) { cfg.sweep.values = get_numbers(x, "sweep.values"); });
    with(v, "runs", [&](const json& x) { cfg.sweep.runs = get_int(x, "sweep.runs"); });
  });
  with(doc, "output_dir", [&](const json& v) { cfg.output_dir = get_string(v, "output_dir"); });

  try {
    p.validate();
  } catch (const ConfigError& e) {
    if (p.eta > 0.5 * (1.0 - p.threshold_fidelity) + 1e-12 && p.eta > 0.0) {
      throw ConfigError("field 'eta': protocol constraint eta <= (1 - F_T)/2 violated (eta=" + std::to_string(p.eta) +
                        ", F_T=" + std::to_string(p.threshold_fidelity) + ")");
    }
    throw;
  }
  cfg.adversary.validate();
  if (cfg.sweep.runs < 100) throw ConfigError("field 'sweep.runs': must be >= 100");
  if (cfg.sweep.kind != "shipped") {
    const AdversaryKind kind = adversary_kind_from_string(cfg.sweep.kind);
    if (AdversarySpec{kind, 0.0}.has_parameter() && cfg.sweep.values.empty()) {
      throw ConfigError("field 'sweep.values': required for sweep kind '" + cfg.sweep.kind + "'");
    }
    for (const auto& a : cfg.sweep_adversaries()) a.validate();
  }
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + key + "' is not inside an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace cvv::cli
