#include "cvverify/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cvverify/errors.hpp"
#include "cvverify/homodyne.hpp"
#include "cvverify/parallel.hpp"
#include "cvverify/rng.hpp"

namespace cvv {
namespace {

void validate_eta_beta(double eta, double beta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
}

SamplingPlan base_plan(const WitnessSpec& spec, double eta, double beta, std::uint64_t seed) {
  validate_eta_beta(eta, beta);
  SamplingPlan plan;
  plan.sum_abs_lambda = spec.sum_abs_lambda();
  if (!(plan.sum_abs_lambda > 0.0)) throw ContractViolation("witness has no non-zero coefficients");
  plan.index_probs.reserve(spec.terms.size());
  for (const auto& t : spec.terms) plan.index_probs.push_back(std::abs(t.lambda) / plan.sum_abs_lambda);
  plan.seed = seed;
  plan.eta = eta;
  plan.beta = beta;
  return plan;
}

struct BlockTally {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<std::int64_t> counts;
  std::vector<TrialRecord> records;
};

}  // namespace

std::string to_string(MomentSource source) {
  switch (source) {
    case MomentSource::kHonestState: return "honest_state";
    case MomentSource::kSuppliedState: return "supplied_state";
    case MomentSource::kMomentBound: return "moment_bound";
  }
  return "unknown";
}

std::string to_string(Decision decision) { return decision == Decision::kAccept ? "accept" : "reject"; }

std::int64_t required_trials(double second_moment, double eta, double beta) {
  validate_eta_beta(eta, beta);
  if (!(second_moment >= 0.0)) throw ContractViolation("second moment must be non-negative");
  const double n = std::ceil(33.0 * second_moment * std::log(8.0 / beta) / (eta * eta));
  return std::max<std::int64_t>(kMinTrials, static_cast<std::int64_t>(n));
}

double tail_bound(std::int64_t trials, double eta, double second_moment) {
  return 8.0 * std::exp(-static_cast<double>(trials) * eta * eta / (33.0 * second_moment));
}

double second_moment_exact(const DensityMatrix& rho_single, const WitnessSpec& spec) {
  if (rho_single.mode_count() != 1) throw DimensionMismatch("second_moment_exact expects a single-mode state");
  const int dim = rho_single.dimension();
  std::array<double, 6> squared{};
  for (std::size_t t = 0; t < kWitnessTerms.size(); ++t) {
    const auto d = ObservableDescriptor::for_term(kWitnessTerms[t], 0);
    // f^2 = scale^2 x_angle^(2 power), exact elements up to x^8.
    squared[t] = d.scale * d.scale * rho_single.expectation(quadrature_power(dim, d.angle, 2 * d.power));
  }
  double inner = 0.0;
  for (const auto& entry : spec.terms) {
    inner += std::abs(entry.lambda) * squared[static_cast<std::size_t>(entry.observable.term())];
  }
  return spec.sum_abs_lambda() * inner;
}

SamplingPlan make_plan(const WitnessSpec& spec, double eta, double beta, std::uint64_t seed) {
  const DensityMatrix honest = DensityMatrix::pure(cubic_phase_state(spec.resource));
  SamplingPlan plan = make_plan(spec, eta, beta, honest, seed);
  plan.moment_source = MomentSource::kHonestState;
  return plan;
}

SamplingPlan make_plan(const WitnessSpec& spec, double eta, double beta, const DensityMatrix& rho_for_bound,
                       std::uint64_t seed) {
  SamplingPlan plan = base_plan(spec, eta, beta, seed);
  plan.second_moment = second_moment_exact(rho_for_bound, spec);
  plan.moment_source = MomentSource::kSuppliedState;
  plan.trials = required_trials(plan.second_moment, eta, beta);
  return plan;
}

SamplingPlan make_plan_from_moment_bound(const WitnessSpec& spec, double eta, double beta, double moment_bound,
                                         std::uint64_t seed) {
  if (!(moment_bound > 0.0)) throw ConfigError("moment bound must be positive");
  SamplingPlan plan = base_plan(spec, eta, beta, seed);
  plan.second_moment = plan.sum_abs_lambda * plan.sum_abs_lambda * moment_bound;
  plan.moment_source = MomentSource::kMomentBound;
  plan.trials = required_trials(plan.second_moment, eta, beta);
  return plan;
}

EstimateReport estimate_f_low(const DensityMatrix& rho_single, const WitnessSpec& spec, const SamplingPlan& plan,
                              const EstimateOptions& options) {
  return estimate_f_low(HomodyneSampler(rho_single), spec, plan, options);
}

EstimateReport estimate_f_low(const HomodyneSampler& sampler, const WitnessSpec& spec, const SamplingPlan& plan,
                              const EstimateOptions& options) {
  if (plan.index_probs.size() != spec.terms.size()) {
    throw ContractViolation("sampling plan does not match the witness");
  }
  if (plan.trials < 1) throw ContractViolation("sampling plan has no trials");

  const std::size_t terms = spec.terms.size();
  std::vector<const QuadratureSampler*> basis(terms);
  std::vector<double> cumulative(terms);
  std::vector<double> signed_weight(terms);
  double acc = 0.0;
  for (std::size_t i = 0; i < terms; ++i) {
    basis[i] = &sampler.at(spec.terms[i].observable.angle);
    acc += plan.index_probs[i];
    cumulative[i] = acc;
    signed_weight[i] = spec.terms[i].lambda >= 0.0 ? plan.sum_abs_lambda : -plan.sum_abs_lambda;
  }
  cumulative.back() = 1.0;

  const auto blocks = static_cast<std::size_t>((plan.trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  std::vector<BlockTally> tallies(blocks);
  const bool keep = options.trace != nullptr;

  parallel_for(blocks, options.workers, [&](std::size_t b) {
    BlockTally& tally = tallies[b];
    tally.counts.assign(terms, 0);
    Rng rng = make_stream(plan.seed, options.stream, b);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kTrialsPerBlock;
    const std::int64_t end = std::min(plan.trials, begin + kTrialsPerBlock);
    if (keep) tally.records.reserve(static_cast<std::size_t>(end - begin));
    for (std::int64_t k = begin; k < end; ++k) {
      const double u = uniform01(rng);
      auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (i >= terms) i = terms - 1;
      // rounding in the cumulative sum can leave a trailing zero-weight term reachable
      while (i > 0 && plan.index_probs[i] == 0.0) --i;
      const auto& obs = spec.terms[i].observable;
      const double x = basis[i]->sample(rng);
      double f = x;
      for (int p = 1; p < obs.power; ++p) f *= x;
      f *= obs.scale;
      const double value = signed_weight[i] * f;
      tally.sum += value;
      tally.sum_sq += value * value;
      ++tally.counts[i];
      if (keep) tally.records.push_back({k, static_cast<int>(i), f, value});
    }
  });

  EstimateReport report;
  report.trials = plan.trials;
  report.per_index_counts.assign(terms, 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& t : tallies) {
    sum += t.sum;
    sum_sq += t.sum_sq;
    for (std::size_t i = 0; i < terms; ++i) report.per_index_counts[i] += t.counts[i];
  }
  if (keep) {
    options.trace->clear();
    options.trace->reserve(static_cast<std::size_t>(plan.trials));
    for (auto& t : tallies) options.trace->insert(options.trace->end(), t.records.begin(), t.records.end());
  }
  const auto n = static_cast<double>(plan.trials);
  report.empirical_mean = sum / n;
  report.empirical_second_moment = sum_sq / n;
  const double variance = std::max(0.0, report.empirical_second_moment - report.empirical_mean * report.empirical_mean);
  report.standard_error = n > 1 ? std::sqrt(variance / (n - 1.0)) : 0.0;
  report.f_low_est = spec.constant + report.empirical_mean;
  return report;
}

void validate_threshold(double threshold_fidelity, double eta) {
  if (!(threshold_fidelity > 0.0 && threshold_fidelity < 1.0)) {
    throw ConfigError("threshold fidelity F_T must lie in (0, 1)");
  }
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (eta > 0.5 * (1.0 - threshold_fidelity) + 1e-12) {
    throw ConfigError("eta must satisfy eta <= (1 - F_T)/2");
  }
}

Decision decide(double f_low_est, double threshold_fidelity, double eta) {
  validate_threshold(threshold_fidelity, eta);
  return f_low_est < threshold_fidelity + eta ? Decision::kReject : Decision::kAccept;
}

}  // namespace cvv
