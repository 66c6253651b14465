#include "cvverify/protocol.hpp"

#include <cmath>
#include <sstream>

#include "cvverify/errors.hpp"
#include "cvverify/parallel.hpp"
#include "cvverify/rng.hpp"

namespace cvv {
namespace {

// Substream layout under params.seed: estimation of run k uses stream 2k,
// its injections stream 2k + 1.
std::uint64_t estimation_stream(std::uint64_t run) { return 2 * run; }
std::uint64_t injection_stream(std::uint64_t run) { return 2 * run + 1; }

const ProtocolParams& validated(const ProtocolParams& params) {
  params.validate();
  return params;
}

}  // namespace

void ProtocolParams::validate() const {
  if (copies < 1) throw ConfigError("M (copies) must be >= 1");
  if (gamma_list.size() != static_cast<std::size_t>(copies)) {
    throw ConfigError("gamma_list must have exactly M entries");
  }
  if (!std::isfinite(gamma_tilde) || gamma_tilde == 0.0) throw ConfigError("gamma_tilde must be finite and non-zero");
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("s must be positive");
  for (double g : gamma_list) {
    if (!std::isfinite(g) || g == 0.0 || (g > 0.0) != (gamma_tilde > 0.0)) {
      throw ConfigError("every gamma_list entry must be non-zero with the sign of gamma_tilde");
    }
  }
  validate_threshold(threshold_fidelity, eta);
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (dimension < 8) throw ConfigError("D must be >= 8");
  if (injection_dimension < 4) throw ConfigError("injection_dimension must be >= 4");
  if (!(tail_tolerance > 0.0) || !(injection_tail_tolerance > 0.0)) {
    throw ConfigError("tail tolerances must be positive");
  }
  if (!(input.width > 0.0)) throw ConfigError("input.width must be positive");
  if (moment_bound && !(*moment_bound > 0.0)) throw ConfigError("moment_bound must be positive");
}

ResourceSpec ProtocolParams::resource() const { return {gamma_tilde, s, copies, dimension, tail_tolerance}; }

ResourceSpec ProtocolParams::injection_resource() const {
  return {gamma_tilde, s, 1, injection_dimension, injection_tail_tolerance};
}

InjectionParams ProtocolParams::injection(double gamma) const {
  return {gamma, gamma_tilde, s, injection_dimension, injection_tail_tolerance};
}

std::string BobView::requested_state_id() const {
  std::ostringstream out;
  out.precision(17);
  out << "cubic_phase(gamma_tilde=" << gamma_tilde << ",s=" << s << ")";
  return out.str();
}

RequestPlan plan_request(const ProtocolParams& params) {
  params.validate();
  const WitnessSpec spec = build_witness(params.resource());
  RequestPlan req;
  req.plan = params.moment_bound
                 ? make_plan_from_moment_bound(spec, params.eta, params.beta, *params.moment_bound, params.seed)
                 : make_plan(spec, params.eta, params.beta, params.seed);
  req.trials = req.plan.trials;
  req.copies = req.trials + 1;
  req.view = {req.copies, params.copies, params.gamma_tilde, params.s};
  return req;
}

ProtocolRunner::ProtocolRunner(const ProtocolParams& params, const AdversarySpec& adversary)
    : params_(validated(params)),
      adversary_(adversary),
      witness_(build_witness(params_.resource())),
      request_(plan_request(params_)),
      rho_(adversary_state(adversary, params_.resource())),
      sampler_(rho_),
      rho_injection_(adversary_state(adversary, params_.injection_resource())),
      input_(gaussian_state(params_.input, params_.injection_dimension, params_.injection_tail_tolerance)) {
  fidelity_single_ = fidelity(cubic_phase_state(params_.resource()), rho_);
  circuits_.reserve(params_.gamma_list.size());
  for (double g : params_.gamma_list) circuits_.emplace_back(params_.injection(g));
}

double ProtocolRunner::fidelity_exact() const { return std::pow(fidelity_single_, params_.copies); }

Transcript ProtocolRunner::run(std::uint64_t run_index, int workers) const {
  Transcript t;
  t.run_index = run_index;
  t.request = request_;
  t.adversary = adversary_;
  t.fidelity_exact = fidelity_exact();

  EstimateOptions opts;
  opts.workers = workers;
  opts.stream = estimation_stream(run_index);
  t.estimate = estimate_f_low(sampler_, witness_, request_.plan, opts);
  t.decision = decide(t.estimate.f_low_est, params_.threshold_fidelity, params_.eta);
  if (t.decision == Decision::kReject) return t;

  // Chained injection is out of scope: each gate acts on the input through its
  // own copy of the remaining state and the run scores the product.
  double correct = 1.0;
  for (std::size_t j = 0; j < circuits_.size(); ++j) {
    Rng rng = make_stream(params_.seed, injection_stream(run_index), j);
    t.injections.push_back(circuits_[j].run(input_, rho_injection_, std::nullopt, &rng));
    correct *= std::clamp(t.injections.back().fidelity_to_target, 0.0, 1.0);
  }
  t.incorrectness = 1.0 - correct;
  return t;
}

Transcript run_protocol(const ProtocolParams& params, const AdversarySpec& adversary, std::uint64_t run_index,
                        int workers) {
  return ProtocolRunner(params, adversary).run(run_index, workers);
}

std::vector<AdversarySpec> shipped_adversaries() {
  return {AdversarySpec::honest(),
          AdversarySpec::wrong_gamma(0.05),
          AdversarySpec::wrong_gamma(0.15),
          AdversarySpec::gaussian_only(),
          AdversarySpec::vacuum(),
          AdversarySpec::thermal_mix(0.1),
          AdversarySpec::thermal_mix(0.3),
          AdversarySpec::orthogonal_mix(0.05),
          AdversarySpec::orthogonal_mix(0.1),
          AdversarySpec::orthogonal_mix(0.2),
          AdversarySpec::orthogonal_mix(0.3),
          AdversarySpec::orthogonal_mix(0.5)};
}

double epsilon_bound(double threshold_fidelity, double beta) { return 1.0 - (1.0 - beta) * threshold_fidelity; }

VerifiabilityReport verifiability_monte_carlo(const ProtocolParams& params, const AdversarySpec& adversary, int runs,
                                              int workers) {
  if (runs < 100) throw ConfigError("verifiability Monte Carlo needs runs >= 100");
  const ProtocolRunner runner(params, adversary);

  VerifiabilityReport report;
  report.adversary = adversary;
  report.runs = runs;
  report.fidelity_exact = runner.fidelity_exact();
  report.trials_per_run = runner.request().trials;
  report.rows.resize(static_cast<std::size_t>(runs));
  parallel_for(report.rows.size(), workers, [&](std::size_t k) {
    const Transcript t = runner.run(k, 1);
    RunSummary& row = report.rows[k];
    row.run_index = k;
    row.f_low_est = t.estimate.f_low_est;
    row.decision = t.decision;
    row.incorrectness = t.incorrectness;
    if (!t.injections.empty()) row.x_meas = t.injections.front().x_meas;
  });

  double joint = 0.0;
  for (const auto& row : report.rows) {
    if (row.decision != Decision::kAccept) continue;
    ++report.accepts;
    joint += *row.incorrectness;
  }
  report.accept_rate = static_cast<double>(report.accepts) / runs;
  report.joint_prob_est = joint / runs;
  report.epsilon_bound = epsilon_bound(params.threshold_fidelity, params.beta);
  report.sigma = std::sqrt(report.epsilon_bound * (1.0 - report.epsilon_bound) / runs);
  report.violation = report.joint_prob_est > report.epsilon_bound + 3.0 * report.sigma;
  return report;
}

std::string to_string(ViewComparison comparison) {
  switch (comparison) {
    case ViewComparison::kIdentical: return "identical";
    case ViewComparison::kDiffering: return "differing";
    case ViewComparison::kNotComparable: return "not_comparable";
  }
  return "unknown";
}

BlindnessAudit blindness_audit(const ProtocolParams& params_a, const ProtocolParams& params_b) {
  BlindnessAudit audit;
  audit.view_a = plan_request(params_a).view;
  audit.view_b = plan_request(params_b).view;
  const BobView& a = audit.view_a;
  const BobView& b = audit.view_b;
  if (a.copies_requested != b.copies_requested) audit.differing_fields.push_back("copies_requested");
  if (a.modes_per_copy != b.modes_per_copy) audit.differing_fields.push_back("modes_per_copy");
  if (a.gamma_tilde != b.gamma_tilde) audit.differing_fields.push_back("gamma_tilde");
  if (a.s != b.s) audit.differing_fields.push_back("s");
  audit.identical_views = audit.differing_fields.empty();

  const bool public_match = params_a.copies == params_b.copies && params_a.gamma_tilde == params_b.gamma_tilde &&
                            params_a.s == params_b.s && params_a.eta == params_b.eta &&
                            params_a.beta == params_b.beta &&
                            params_a.threshold_fidelity == params_b.threshold_fidelity;
  if (!public_match) {
    audit.comparison = ViewComparison::kNotComparable;
  } else {
    audit.comparison = audit.identical_views ? ViewComparison::kIdentical : ViewComparison::kDiffering;
  }
  return audit;
}

}  // namespace cvv
