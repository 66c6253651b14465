#include <gtest/gtest.h>

#include "cvverify/errors.hpp"
#include "cvverify/protocol.hpp"

using namespace cvv;

namespace {

ProtocolParams base() {
  ProtocolParams p;
  p.seed = 31;
  return p;
}

double binomial_slack(double p, int n) { return 3 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(PlanRequest, ViewIgnoresSecrets) {
  ProtocolParams a = base();
  ProtocolParams b = base();
  b.gamma_list = {0.2};
  b.input = {0.7, 1.0, -0.3};
  b.seed = 99;
  const RequestPlan ra = plan_request(a);
  EXPECT_EQ(ra.view, plan_request(b).view);
  EXPECT_EQ(ra.copies, ra.trials + 1);
  EXPECT_EQ(ra.view.copies_requested, ra.copies);
  EXPECT_EQ(ra.view.modes_per_copy, 1);
  EXPECT_EQ(ra.view.requested_state_id(), "cubic_phase(gamma_tilde=0.10000000000000001,s=1)");
}

TEST(PlanRequest, TwoModesQuadrupleTrials) {
  ProtocolParams two = base();
  two.copies = 2;
  two.gamma_list = {0.1, 0.1};
  const auto n1 = plan_request(base()).trials;
  const auto n2 = plan_request(two).trials;
  EXPECT_LE(std::abs(n2 - 4 * n1), 4);
}

TEST(PlanRequest, Validation) {
  ProtocolParams p = base();
  p.gamma_list = {0.1, 0.2};
  EXPECT_THROW(plan_request(p), ConfigError);
  p = base();
  p.eta = 0.06;
  EXPECT_THROW(plan_request(p), ConfigError);
  p = base();
  p.beta = 1.0;
  EXPECT_THROW(plan_request(p), ConfigError);
  p = base();
  p.gamma_list = {-0.1};
  EXPECT_THROW(plan_request(p), ConfigError);
}

TEST(RunProtocol, HonestAcceptRate) {
  const ProtocolRunner runner(base(), AdversarySpec::honest());
  int accepts = 0;
  double worst = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Transcript t = runner.run(k);
    if (t.decision == Decision::kAccept) {
      ++accepts;
      ASSERT_TRUE(t.incorrectness.has_value());
      worst = std::max(worst, *t.incorrectness);
    } else {
      EXPECT_FALSE(t.incorrectness.has_value());
      EXPECT_TRUE(t.injections.empty());
    }
  }
  EXPECT_GE(accepts / 200.0, 0.95 - binomial_slack(0.95, 200));
  EXPECT_LT(worst, 1e-3);
}

TEST(RunProtocol, VacuumBelowThresholdIsRejected) {
  ProtocolParams p = base();
  p.gamma_tilde = 0.15;
  p.s = 0.8;
  p.gamma_list = {0.15};
  p.threshold_fidelity = 0.96;
  p.eta = 0.02;
  const ProtocolRunner runner(p, AdversarySpec::vacuum());
  ASSERT_LT(runner.fidelity_exact(), p.threshold_fidelity);
  int rejects = 0;
  for (std::uint64_t k = 0; k < 100; ++k) rejects += runner.run(k).decision == Decision::kReject;
  EXPECT_GE(rejects / 100.0, 0.95 - binomial_slack(0.95, 100));
}

TEST(RunProtocol, FixedSeedReproduces) {
  const Transcript a = run_protocol(base(), AdversarySpec::thermal_mix(0.1), 3);
  const Transcript b = run_protocol(base(), AdversarySpec::thermal_mix(0.1), 3, 4);
  EXPECT_EQ(a.estimate.f_low_est, b.estimate.f_low_est);
  EXPECT_EQ(a.decision, b.decision);
  EXPECT_EQ(a.incorrectness, b.incorrectness);
  ASSERT_EQ(a.injections.size(), b.injections.size());
  if (!a.injections.empty()) EXPECT_EQ(a.injections[0].x_meas, b.injections[0].x_meas);
}

TEST(RunProtocol, TwoGatesScoreProduct) {
  ProtocolParams p = base();
  p.copies = 2;
  p.gamma_list = {0.1, 0.05};
  const Transcript t = run_protocol(p, AdversarySpec::honest(), 0);
  ASSERT_EQ(t.decision, Decision::kAccept);
  ASSERT_EQ(t.injections.size(), 2u);
  const double prod = t.injections[0].fidelity_to_target * t.injections[1].fidelity_to_target;
  EXPECT_NEAR(*t.incorrectness, 1 - prod, 1e-15);
}

TEST(Verifiability, EpsilonFormula) { EXPECT_NEAR(epsilon_bound(0.9, 0.05), 0.145, 1e-15); }

TEST(Verifiability, HonestJointIsTruncationLevel) {
  const VerifiabilityReport r = verifiability_monte_carlo(base(), AdversarySpec::honest(), 100);
  EXPECT_FALSE(r.violation);
  EXPECT_LT(r.joint_prob_est, 1e-3);
  EXPECT_EQ(r.rows.size(), 100u);
}

TEST(Verifiability, OrthogonalMixSweepWithinBound) {
  for (double q : {0.05, 0.1, 0.3, 0.5}) {
    const VerifiabilityReport r = verifiability_monte_carlo(base(), AdversarySpec::orthogonal_mix(q), 100);
    EXPECT_LE(r.joint_prob_est, r.epsilon_bound) << q;
    EXPECT_NEAR(r.fidelity_exact, 1 - q, 1e-10);
  }
}

TEST(Verifiability, RunsPrecondition) {
  EXPECT_THROW(verifiability_monte_carlo(base(), AdversarySpec::honest(), 99), ConfigError);
}

TEST(Blindness, AuditOutcomes) {
  ProtocolParams a = base();
  ProtocolParams b = base();
  b.gamma_list = {0.2};
  BlindnessAudit r = blindness_audit(a, b);
  EXPECT_EQ(r.comparison, ViewComparison::kIdentical);
  EXPECT_TRUE(r.identical_views);

  b = base();
  b.input = {2.0, -1.0, 0.5};
  EXPECT_TRUE(blindness_audit(a, b).identical_views);

  b = base();
  b.copies = 3;
  b.gamma_list = {0.1, 0.1, 0.1};
  r = blindness_audit(a, b);
  EXPECT_EQ(r.comparison, ViewComparison::kNotComparable);
  EXPECT_EQ(r.differing_fields, (std::vector<std::string>{"copies_requested", "modes_per_copy"}));
}

TEST(ShippedAdversaries, AllBuildAtDefaultTruncations) {
  for (const auto& a : shipped_adversaries()) EXPECT_NO_THROW(ProtocolRunner(base(), a)) << a.label();
}
