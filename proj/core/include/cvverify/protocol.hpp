#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvverify/estimator.hpp"
#include "cvverify/homodyne.hpp"
#include "cvverify/injection.hpp"
#include "cvverify/states.hpp"
#include "cvverify/witness.hpp"

namespace cvv {

struct ProtocolParams {
  int copies = 1;  // M: modes per requested copy, one per gate
  double gamma_tilde = 0.1;
  double s = 1.0;
  std::vector<double> gamma_list{0.1};  // client secret, one per gate
  double threshold_fidelity = 0.9;
  double beta = 0.05;
  double eta = 0.05;
  int dimension = 40;
  int injection_dimension = 24;
  double tail_tolerance = kDefaultTailTolerance;
  double injection_tail_tolerance = 1e-6;
  std::uint64_t seed = 0;
  GaussianInput input;  // client secret
  /// When set, N is sized from this bound on max_i Tr(f_i^2 rho) instead of
  /// the honest state's exact second moment.
  std::optional<double> moment_bound;

  /// Throws ConfigError on any range violation.
  void validate() const;
  ResourceSpec resource() const;
  ResourceSpec injection_resource() const;
  InjectionParams injection(double gamma) const;
};

/// Everything the server sees.
struct BobView {
  std::int64_t copies_requested = 0;
  int modes_per_copy = 0;
  double gamma_tilde = 0.0;
  double s = 0.0;

  std::string requested_state_id() const;
  bool operator==(const BobView&) const = default;
};

struct RequestPlan {
  SamplingPlan plan;
  std::int64_t trials = 0;  // N
  std::int64_t copies = 0;  // N + 1
  BobView view;
};

RequestPlan plan_request(const ProtocolParams& params);

struct Transcript {
  std::uint64_t run_index = 0;
  RequestPlan request;
  AdversarySpec adversary;
  double fidelity_exact = 0.0;  // F(sigma^{(x)M}, rho^{(x)M})
  EstimateReport estimate;
  Decision decision = Decision::kReject;
  std::vector<InjectionResult> injections;  // empty on reject
  std::optional<double> incorrectness;      // 1 - prod_j fidelity_to_target; unset on reject
};

/// Precomputes the adversary's state, its homodyne samplers and the client
/// circuits once, then runs independent protocol instances by index.
class ProtocolRunner {
 public:
  ProtocolRunner(const ProtocolParams& params, const AdversarySpec& adversary);

  const ProtocolParams& params() const noexcept { return params_; }
  const AdversarySpec& adversary() const noexcept { return adversary_; }
  const RequestPlan& request() const noexcept { return request_; }
  const WitnessSpec& witness() const noexcept { return witness_; }
  /// Single-copy F(sigma, rho) at the estimation truncation.
  double single_copy_fidelity() const noexcept { return fidelity_single_; }
  double fidelity_exact() const;

  /// Run `run_index` draws from substreams of params.seed only, so results
  /// do not depend on `workers` or on which other runs are executed.
  Transcript run(std::uint64_t run_index, int workers = 1) const;

 private:
  ProtocolParams params_;
  AdversarySpec adversary_;
  WitnessSpec witness_;
  RequestPlan request_;
  DensityMatrix rho_;
  HomodyneSampler sampler_;
  double fidelity_single_ = 0.0;
  DensityMatrix rho_injection_;
  FockState input_;
  std::vector<InjectionCircuit> circuits_;
};

Transcript run_protocol(const ProtocolParams& params, const AdversarySpec& adversary, std::uint64_t run_index = 0,
                        int workers = 1);

/// The adversary grid used by sweeps and the verifiability checks.
std::vector<AdversarySpec> shipped_adversaries();

/// 1 - (1 - beta) F_T.
double epsilon_bound(double threshold_fidelity, double beta);

struct RunSummary {
  std::uint64_t run_index = 0;
  double f_low_est = 0.0;
  Decision decision = Decision::kReject;
  std::optional<double> incorrectness;
  double x_meas = 0.0;  // first injection branch; 0 on reject
};

struct VerifiabilityReport {
  AdversarySpec adversary;
  int runs = 0;
  int accepts = 0;
  double fidelity_exact = 0.0;
  double accept_rate = 0.0;
  double joint_prob_est = 0.0;  // mean of accept * incorrectness
  double epsilon_bound = 0.0;
  double sigma = 0.0;  // sqrt(eps (1 - eps) / runs)
  bool violation = false;
  std::int64_t trials_per_run = 0;
  std::vector<RunSummary> rows;
};

/// Throws ConfigError for runs < 100.
VerifiabilityReport verifiability_monte_carlo(const ProtocolParams& params, const AdversarySpec& adversary, int runs,
                                              int workers = 1);

enum class ViewComparison { kIdentical, kDiffering, kNotComparable };
std::string to_string(ViewComparison comparison);

struct BlindnessAudit {
  ViewComparison comparison = ViewComparison::kNotComparable;
  bool identical_views = false;
  std::vector<std::string> differing_fields;
  BobView view_a;
  BobView view_b;
};

/// Compares the server views of two parameter sets. Sets with different M or
/// different public parameters are not comparable.
BlindnessAudit blindness_audit(const ProtocolParams& params_a, const ProtocolParams& params_b);

}  // namespace cvv
