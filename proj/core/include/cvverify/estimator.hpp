#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvverify/fock.hpp"
#include "cvverify/homodyne.hpp"
#include "cvverify/witness.hpp"

namespace cvv {

/// Where the second moment <F^2> used for sizing N came from.
enum class MomentSource {
  kHonestState,    // exact value on the requested resource state
  kSuppliedState,  // exact value on a caller-supplied state
  kMomentBound,    // (sum |lambda|)^2 * declared bound on max_i Tr(f_i^2 rho)
};

std::string to_string(MomentSource source);

inline constexpr std::int64_t kMinTrials = 100;
inline constexpr std::int64_t kTrialsPerBlock = 4096;

struct SamplingPlan {
  std::vector<double> index_probs;  // p(i) = |lambda_i| / sum_j |lambda_j|
  double sum_abs_lambda = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double second_moment = 0.0;
  MomentSource moment_source = MomentSource::kHonestState;
  double eta = 0.0;
  double beta = 0.0;
};

struct EstimateReport {
  double f_low_est = 0.0;
  std::int64_t trials = 0;
  double empirical_mean = 0.0;           // mean of F_{i,f} without the constant offset
  double empirical_second_moment = 0.0;  // mean of F_{i,f}^2
  double standard_error = 0.0;
  std::vector<std::int64_t> per_index_counts;
};

/// One trial of the importance-sampling estimator.
struct TrialRecord {
  std::int64_t trial;
  int index;     // 0-based witness term
  double f;      // observed eigenvalue of f_i
  double value;  // F_{i,f} = sum_j |lambda_j| sign(lambda_i) f
};

struct EstimateOptions {
  int workers = 1;
  /// Substream tag; distinct estimates sharing a seed must use distinct streams.
  std::uint64_t stream = 0;
  /// When set, receives every trial in trial order.
  std::vector<TrialRecord>* trace = nullptr;
};

/// max(kMinTrials, ceil(33 <F^2> ln(8/beta) / eta^2)).
std::int64_t required_trials(double second_moment, double eta, double beta);

/// 8 exp(-N eta^2 / (33 <F^2>)): bound on P(|F_est - F_low| >= eta).
double tail_bound(std::int64_t trials, double eta, double second_moment);

/// <F^2> = (sum_j |lambda_j|) sum_i |lambda_i| Tr(f_i^2 rho) over the 6M terms,
/// with every copy in state rho_single.
double second_moment_exact(const DensityMatrix& rho_single, const WitnessSpec& spec);

/// Sizes N with the exact <F^2> of the honest resource state.
SamplingPlan make_plan(const WitnessSpec& spec, double eta, double beta, std::uint64_t seed);
/// Sizes N with the exact <F^2> of `rho_for_bound`.
SamplingPlan make_plan(const WitnessSpec& spec, double eta, double beta, const DensityMatrix& rho_for_bound,
                       std::uint64_t seed);
/// Sizes N with <F^2> <= (sum |lambda|)^2 * moment_bound.
SamplingPlan make_plan_from_moment_bound(const WitnessSpec& spec, double eta, double beta, double moment_bound,
                                         std::uint64_t seed);

/// Importance-sampling estimate of F_low from plan.trials homodyne trials on
/// fresh copies of rho_single. Bit-identical for a fixed (seed, stream)
/// regardless of options.workers.
EstimateReport estimate_f_low(const DensityMatrix& rho_single, const WitnessSpec& spec, const SamplingPlan& plan,
                              const EstimateOptions& options = {});
/// Same, reusing prebuilt samplers for the four witness bases.
EstimateReport estimate_f_low(const HomodyneSampler& sampler, const WitnessSpec& spec, const SamplingPlan& plan,
                              const EstimateOptions& options = {});

enum class Decision { kAccept, kReject };
std::string to_string(Decision decision);

/// Throws ConfigError unless 0 < F_T < 1 and 0 < eta <= (1 - F_T)/2.
void validate_threshold(double threshold_fidelity, double eta);

/// Reject iff f_low_est < F_T + eta.
Decision decide(double f_low_est, double threshold_fidelity, double eta);

}  // namespace cvv
