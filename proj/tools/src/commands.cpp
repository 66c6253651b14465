#include "cvverify_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvverify/errors.hpp"
#include "cvverify/parallel.hpp"

#ifndef CVVERIFY_VERSION
#define CVVERIFY_VERSION "unknown"
#endif

namespace cvv::cli {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json skeleton(const std::string& command) {
  Json r;
  r["tool"] = "cvverify";
  r["version"] = version();
  r["command"] = command;
  r["status"] = "ok";
  return r;
}

Json terms_json(const WitnessSpec& spec) {
  Json out = Json::array();
  for (const auto& e : spec.terms) {
    out.push_back({{"mode", e.observable.mode},
                   {"term", to_string(e.observable.term())},
                   {"lambda", e.lambda},
                   {"angle", e.observable.angle},
                   {"power", e.observable.power},
                   {"scale", e.observable.scale}});
  }
  return out;
}

Json plan_json(const SamplingPlan& plan) {
  return {{"N", plan.trials},
          {"eta", plan.eta},
          {"beta", plan.beta},
          {"second_moment", plan.second_moment},
          {"moment_source", to_string(plan.moment_source)},
          {"sum_abs_lambda", plan.sum_abs_lambda},
          {"index_probs", plan.index_probs}};
}

Json view_json(const BobView& v) {
  return {{"copies_requested", v.copies_requested},
          {"modes_per_copy", v.modes_per_copy},
          {"requested_state_id", v.requested_state_id()},
          {"gamma_tilde", v.gamma_tilde},
          {"s", v.s}};
}

Json injection_json(const InjectionResult& r, double gamma) {
  return {{"gamma", gamma},
          {"x_meas", r.x_meas},
          {"branch_weight", r.branch_weight},
          {"fidelity_to_target", r.fidelity_to_target},
          {"improbable_branch", r.improbable_branch}};
}

CommandOutput witness_eval(const RunConfig& cfg) {
  CommandOutput out;
  const ResourceSpec resource = cfg.protocol.resource();
  const WitnessSpec spec = build_witness(resource);
  const DensityMatrix rho = adversary_state(cfg.adversary, resource);
  const double fid = fidelity(cubic_phase_state(resource), rho);

  Json terms = terms_json(spec);
  std::ostringstream csv;
  csv << "mode,term,lambda,angle,power,scale,expectation\n";
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const auto& e = spec.terms[i];
    const double ev = rho.expectation(observable_matrix(e.observable, resource.dimension));
    terms[i]["expectation"] = ev;
    csv << e.observable.mode << ',' << to_string(e.observable.term()) << ',' << num(e.lambda) << ','
        << num(e.observable.angle) << ',' << e.observable.power << ',' << num(e.observable.scale) << ',' << num(ev)
        << '\n';
  }
  out.report["adversary"] = cfg.adversary.label();
  out.report["f_low"] = f_low_exact(rho, spec);
  out.report["fidelity"] = std::pow(fid, resource.copies);
  out.report["constant"] = spec.constant;
  out.report["sum_abs_lambda"] = spec.sum_abs_lambda();
  out.report["terms"] = std::move(terms);
  out.csv.push_back({"witness_terms.csv", csv.str()});
  return out;
}

CommandOutput estimate(const RunConfig& cfg, int workers) {
  CommandOutput out;
  const ResourceSpec resource = cfg.protocol.resource();
  const WitnessSpec spec = build_witness(resource);
  const DensityMatrix rho = adversary_state(cfg.adversary, resource);
  SamplingPlan plan = plan_request(cfg.protocol).plan;
  const bool overridden = cfg.estimate.trials.has_value();
  if (overridden) plan.trials = *cfg.estimate.trials;

  std::vector<TrialRecord> trace;
  EstimateOptions opts;
  opts.workers = workers;
  if (cfg.estimate.trace) opts.trace = &trace;
  const EstimateReport est = estimate_f_low(rho, spec, plan, opts);
  const double exact = f_low_exact(rho, spec);

  Json& r = out.report;
  r["adversary"] = cfg.adversary.label();
  r["plan"] = plan_json(plan);
  r["trials_overridden"] = overridden;
  r["f_low_est"] = est.f_low_est;
  r["f_low_exact"] = exact;
  r["deviation"] = est.f_low_est - exact;
  r["standard_error"] = est.standard_error;
  r["empirical_second_moment"] = est.empirical_second_moment;
  r["tail_bound"] = tail_bound(plan.trials, plan.eta, plan.second_moment);
  r["per_index_counts"] = est.per_index_counts;
  r["decision"] = to_string(decide(est.f_low_est, cfg.protocol.threshold_fidelity, cfg.protocol.eta));

  std::ostringstream terms;
  terms << "index,mode,term,lambda,probability,count\n";
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const auto& e = spec.terms[i];
    terms << i << ',' << e.observable.mode << ',' << to_string(e.observable.term()) << ',' << num(e.lambda) << ','
          << num(plan.index_probs[i]) << ',' << est.per_index_counts[i] << '\n';
  }
  out.csv.push_back({"estimate_terms.csv", terms.str()});
  if (cfg.estimate.trace) {
    std::ostringstream csv;
    csv << "trial,index,f,value\n";
    for (const auto& t : trace) csv << t.trial << ',' << t.index << ',' << num(t.f) << ',' << num(t.value) << '\n';
    out.csv.push_back({"estimate_trials.csv", csv.str()});
  }
  return out;
}

CommandOutput complexity(const RunConfig& cfg) {
  CommandOutput out;
  const RequestPlan req = plan_request(cfg.protocol);
  const SamplingPlan& plan = req.plan;
  Json& r = out.report;
  r["formula"] = "N = max(100, ceil(33 * second_moment * ln(8 / beta) / eta^2))";
  r["inputs"] = {{"eta", plan.eta},
                 {"beta", plan.beta},
                 {"second_moment", plan.second_moment},
                 {"moment_source", to_string(plan.moment_source)},
                 {"sum_abs_lambda", plan.sum_abs_lambda},
                 {"M", cfg.protocol.copies}};
  r["N"] = req.trials;
  r["copies"] = req.copies;
  r["tail_bound_at_N"] = tail_bound(plan.trials, plan.eta, plan.second_moment);

  std::ostringstream csv;
  csv << "M,second_moment,N\n";
  Json scaling = Json::array();
  for (int m = 1; m <= std::max(4, cfg.protocol.copies); ++m) {
    ProtocolParams p = cfg.protocol;
    p.copies = m;
    p.gamma_list.assign(static_cast<std::size_t>(m), p.gamma_tilde);
    const SamplingPlan pm = plan_request(p).plan;
    scaling.push_back({{"M", m}, {"second_moment", pm.second_moment}, {"N", pm.trials}});
    csv << m << ',' << num(pm.second_moment) << ',' << pm.trials << '\n';
  }
  r["scaling"] = std::move(scaling);
  out.csv.push_back({"complexity_scaling.csv", csv.str()});
  return out;
}

CommandOutput teleport(const RunConfig& cfg) {
  CommandOutput out;
  const ProtocolParams& p = cfg.protocol;
  const double gamma = cfg.teleport.gamma.value_or(p.gamma_list.front());
  const InjectionCircuit circuit(p.injection(gamma));
  const DensityMatrix resource = adversary_state(cfg.adversary, p.injection_resource());
  const FockState input = gaussian_state(p.input, p.injection_dimension, p.injection_tail_tolerance);
  Rng rng = make_stream(p.seed, 0, 0);
  const InjectionResult res = circuit.run(input, resource, cfg.teleport.x_meas, &rng);
  const FockState target = circuit.target(input, res.x_meas);

  Json& r = out.report;
  r["adversary"] = cfg.adversary.label();
  r["gamma"] = gamma;
  r["gamma_tilde"] = p.gamma_tilde;
  r["s"] = p.s;
  r["r"] = circuit.squeeze_ratio();
  r["x_meas_source"] = cfg.teleport.x_meas ? "fixed" : "sampled";
  r["injection"] = injection_json(res, gamma);
  r["output_purity"] = res.output.purity();
  if (res.improbable_branch) r["warnings"] = Json::array({"improbable branch: outcome density below 1e-12"});

  std::ostringstream csv;
  csv << "n,output_population,target_population\n";
  for (int n = 0; n < circuit.dimension(); ++n) {
    csv << n << ',' << num(res.output.entries()(n, n).real()) << ',' << num(std::norm(target[n])) << '\n';
  }
  out.csv.push_back({"teleport_output.csv", csv.str()});
  return out;
}

std::string run_row(const std::string& label, const AdversarySpec& adv, double f_exact, std::uint64_t run,
                    double f_low_est, Decision d, const std::optional<double>& inc) {
  std::ostringstream row;
  row << run << ',' << label << ',' << to_string(adv.kind) << ',' << (adv.has_parameter() ? num(adv.parameter) : "")
      << ',' << num(f_exact) << ',' << num(f_low_est) << ',' << to_string(d) << ',' << opt_num(inc) << '\n';
  return row.str();
}

constexpr const char* kRunHeader = "run,adversary,kind,parameter,F_exact,f_low_est,decision,incorrectness\n";

CommandOutput protocol_run(const RunConfig& cfg, int workers) {
  CommandOutput out;
  const ProtocolRunner runner(cfg.protocol, cfg.adversary);
  std::vector<Transcript> transcripts(static_cast<std::size_t>(cfg.runs));
  if (cfg.runs == 1) {
    transcripts[0] = runner.run(0, workers);
  } else {
    parallel_for(transcripts.size(), workers, [&](std::size_t k) { transcripts[k] = runner.run(k, 1); });
  }

  const RequestPlan& req = runner.request();
  Json& r = out.report;
  r["adversary"] = cfg.adversary.label();
  r["request"] = {{"N", req.trials}, {"copies", req.copies}, {"bob_view", view_json(req.view)},
                  {"plan", plan_json(req.plan)}};
  r["fidelity_exact"] = runner.fidelity_exact();
  r["epsilon_bound"] = epsilon_bound(cfg.protocol.threshold_fidelity, cfg.protocol.beta);

  std::ostringstream csv;
  csv << kRunHeader;
  Json list = Json::array();
  int accepts = 0;
  double joint = 0.0;
  for (const auto& t : transcripts) {
    Json inj = Json::array();
    for (std::size_t j = 0; j < t.injections.size(); ++j) {
      inj.push_back(injection_json(t.injections[j], cfg.protocol.gamma_list[j]));
    }
    list.push_back({{"run_index", t.run_index},
                    {"f_low_est", t.estimate.f_low_est},
                    {"standard_error", t.estimate.standard_error},
                    {"per_index_counts", t.estimate.per_index_counts},
                    {"decision", to_string(t.decision)},
                    {"incorrectness", opt_json(t.incorrectness)},
                    {"injections", std::move(inj)}});
    if (t.decision == Decision::kAccept) {
      ++accepts;
      joint += *t.incorrectness;
    }
    csv << run_row(cfg.adversary.label(), cfg.adversary, t.fidelity_exact, t.run_index, t.estimate.f_low_est,
                   t.decision, t.incorrectness);
  }
  r["summary"] = {{"runs", cfg.runs},
                  {"accepts", accepts},
                  {"accept_rate", static_cast<double>(accepts) / cfg.runs},
                  {"joint_prob_est", joint / cfg.runs}};
  r["transcripts"] = std::move(list);
  out.csv.push_back({"protocol_runs.csv", csv.str()});
  return out;
}

CommandOutput adversary_sweep(const RunConfig& cfg, int workers) {
  CommandOutput out;
  std::ostringstream runs_csv;
  std::ostringstream summary_csv;
  runs_csv << kRunHeader;
  summary_csv << "adversary,kind,parameter,F_exact,accept_rate,joint_prob_est,epsilon_bound,sigma,violation\n";
  Json list = Json::array();
  bool any_violation = false;
  for (const auto& adv : cfg.sweep_adversaries()) {
    const VerifiabilityReport rep = verifiability_monte_carlo(cfg.protocol, adv, cfg.sweep.runs, workers);
    const std::string label = adv.label();
    list.push_back({{"adversary", label},
                    {"kind", to_string(adv.kind)},
                    {"parameter", adv.has_parameter() ? Json(adv.parameter) : Json(nullptr)},
                    {"fidelity_exact", rep.fidelity_exact},
                    {"accepts", rep.accepts},
                    {"accept_rate", rep.accept_rate},
                    {"joint_prob_est", rep.joint_prob_est},
                    {"sigma", rep.sigma},
                    {"violation", rep.violation},
                    {"trials_per_run", rep.trials_per_run}});
    any_violation = any_violation || rep.violation;
    summary_csv << label << ',' << to_string(adv.kind) << ',' << (adv.has_parameter() ? num(adv.parameter) : "")
                << ',' << num(rep.fidelity_exact) << ',' << num(rep.accept_rate) << ',' << num(rep.joint_prob_est)
                << ',' << num(rep.epsilon_bound) << ',' << num(rep.sigma) << ',' << (rep.violation ? 1 : 0) << '\n';
    for (const auto& row : rep.rows) {
      runs_csv << run_row(label, adv, rep.fidelity_exact, row.run_index, row.f_low_est, row.decision,
                          row.incorrectness);
    }
  }
  out.report["runs_per_adversary"] = cfg.sweep.runs;
  out.report["epsilon_bound"] = epsilon_bound(cfg.protocol.threshold_fidelity, cfg.protocol.beta);
  out.report["any_violation"] = any_violation;
  out.report["adversaries"] = std::move(list);
  out.csv.push_back({"sweep_summary.csv", summary_csv.str()});
  out.csv.push_back({"sweep_runs.csv", runs_csv.str()});
  return out;
}

double tail_at(const ResourceSpec& spec) {
  ResourceSpec loose = spec;
  loose.tail_tolerance = 1.0;
  return cubic_phase_state(loose).tail_mass();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"witness-eval", "estimate",      "complexity",
                                              "teleport",     "protocol-run", "adversary-sweep"};
  return names;
}

bool is_command(const std::string& name) {
  return std::find(command_names().begin(), command_names().end(), name) != command_names().end();
}

std::string version() { return CVVERIFY_VERSION; }

Json truncation_diagnostics(const ProtocolParams& params) {
  Json d;
  const ResourceSpec base = params.resource();
  d["D"] = base.dimension;
  d["tail_tolerance"] = base.tail_tolerance;
  const double tail = tail_at(base);
  d["tail_mass"] = tail;
  d["gate_passed"] = tail < base.tail_tolerance;
  Json ladder = Json::array();
  for (int dim : {base.dimension, base.dimension + base.dimension / 2, 2 * base.dimension}) {
    ResourceSpec r = base;
    r.dimension = dim;
    r.copies = 1;
    r.tail_tolerance = 1.0;
    const FockState psi = cubic_phase_state(r);
    const double f = f_low_exact(DensityMatrix::pure(psi), build_witness(r));
    ladder.push_back({{"D", dim}, {"tail_mass", psi.tail_mass()}, {"f_low_minus_one", f - 1.0}});
  }
  d["ladder"] = std::move(ladder);
  const ResourceSpec inj = params.injection_resource();
  const double inj_tail = tail_at(inj);
  const double input_tail = gaussian_state(params.input, inj.dimension, 1.0).tail_mass();
  d["injection"] = {{"D", inj.dimension},
                    {"tail_tolerance", inj.tail_tolerance},
                    {"resource_tail_mass", inj_tail},
                    {"input_tail_mass", input_tail},
                    {"gate_passed", inj_tail < inj.tail_tolerance && input_tail < inj.tail_tolerance}};
  return d;
}

CommandOutput execute(const std::string& command, const RunConfig& cfg, int workers) {
  CommandOutput out;
  Json report = skeleton(command);
  report["config"] = cfg.to_json();
  try {
    report["diagnostics"] = truncation_diagnostics(cfg.protocol);
  } catch (const Error& e) {
    report["diagnostics"] = {{"error", e.what()}};
  }
  try {
    if (command == "witness-eval") {
      out = witness_eval(cfg);
    } else if (command == "estimate") {
      out = estimate(cfg, workers);
    } else if (command == "complexity") {
      out = complexity(cfg);
    } else if (command == "teleport") {
      out = teleport(cfg);
    } else if (command == "protocol-run") {
      out = protocol_run(cfg, workers);
    } else if (command == "adversary-sweep") {
      out = adversary_sweep(cfg, workers);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    report["result"] = std::move(out.report);
  } catch (const TruncationTooSmall& e) {
    out = {};
    out.exit_code = kExitConvergence;
    report["status"] = "truncation_failure";
    report["error"] = {{"message", e.what()}, {"tail_mass", e.tail_mass()}, {"D", e.dimension()}};
  } catch (const DegenerateDecomposition& e) {
    out = {};
    out.exit_code = kExitConvergence;
    report["status"] = "numerical_failure";
    report["error"] = {{"message", e.what()}};
  } catch (const Error& e) {
    out = {};
    out.exit_code = kExitConfig;
    report["status"] = "config_error";
    report["error"] = {{"message", e.what()}};
  }
  out.report = std::move(report);
  return out;
}

CommandOutput config_failure(const std::string& command, const std::string& message) {
  CommandOutput out;
  out.exit_code = kExitConfig;
  out.report = skeleton(command);
  out.report["status"] = "config_error";
  out.report["error"] = {{"message", message}};
  return out;
}

std::string resolve_output_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("CVVERIFY_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_outputs(const CommandOutput& out, const std::string& command, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream json(fs::path(dir) / (command + ".json"), std::ios::binary);
    json << out.report.dump(2) << '\n';
    if (!json) throw std::runtime_error("failed to write report into '" + dir + "'");
  }
  for (const auto& f : out.csv) {
    std::ofstream csv(fs::path(dir) / f.name, std::ios::binary);
    csv << f.content;
    if (!csv) throw std::runtime_error("failed to write " + f.name + " into '" + dir + "'");
  }
}

}  // namespace cvv::cli
