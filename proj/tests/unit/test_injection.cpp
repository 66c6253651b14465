#include <gtest/gtest.h>

#include "cvverify/errors.hpp"
#include "cvverify/injection.hpp"
#include "cvverify/states.hpp"

using namespace cvv;

namespace {

InjectionParams params(double gamma, double gamma_tilde, double s, int d = 24) {
  return {gamma, gamma_tilde, s, d, 1e-6};
}

FockState honest(double g, double s, int d = 24, double tol = 1e-6) { return cubic_phase_state({g, s, 1, d, tol}); }

}  // namespace

TEST(Injection, HonestVacuumBranchZero) {
  const InjectionResult r = inject_cubic(FockState::vacuum(24), honest(0.05, 1.5), params(0.05, 0.05, 1.5), 0.0,
                                         nullptr);
  EXPECT_GE(r.fidelity_to_target, 0.999);
  EXPECT_NEAR(r.output.trace().real(), 1.0, 1e-12);
  EXPECT_GT(r.branch_weight, 0.0);
  ASSERT_TRUE(r.output_state.has_value());
  EXPECT_NEAR(r.output_state->norm_squared(), 1.0, 1e-10);
}

TEST(Injection, SqueezeRatio) {
  EXPECT_EQ(params(0.008, 0.001, 1.0).squeeze_ratio(), 2.0);
  EXPECT_THROW(params(0.1, 0.0, 1.0).squeeze_ratio(), ContractViolation);
  EXPECT_THROW(InjectionCircuit(params(0.1, 0.0, 1.0)), ContractViolation);
}

TEST(Injection, VacuumResourceRegression) {
  const InjectionParams p = params(0.1, 0.1, 1.0);
  const InjectionResult h = inject_cubic(FockState::vacuum(24), honest(0.1, 1.0), p, 0.0, nullptr);
  const InjectionResult v = inject_cubic(FockState::vacuum(24), adversary_state(AdversarySpec::vacuum(), {0.1, 1.0, 1, 24, 1e-6}), p, 0.0, nullptr);
  EXPECT_LT(v.fidelity_to_target, h.fidelity_to_target);
  EXPECT_NEAR(h.fidelity_to_target - v.fidelity_to_target, 0.0023216, 1e-6);
}

TEST(Injection, SampledBranchIsDeterministic) {
  const InjectionCircuit c(params(0.1, 0.05, 1.5));
  const FockState in = gaussian_state({1.0, 0.3, 0.2}, 24, 1e-6);
  Rng a(8);
  Rng b(8);
  const InjectionResult ra = c.run(in, honest(0.05, 1.5), std::nullopt, &a);
  const InjectionResult rb = c.run(in, honest(0.05, 1.5), std::nullopt, &b);
  EXPECT_EQ(ra.x_meas, rb.x_meas);
  EXPECT_GE(ra.fidelity_to_target, 0.999);
  EXPECT_THROW(c.run(in, honest(0.05, 1.5), std::nullopt, nullptr), ContractViolation);
}

TEST(Injection, FactoredEntanglerMatchesDenseExponential) {
  const int d = 10;
  const InjectionCircuit c(params(0.05, 0.05, 1.0, d));
  const FockState in = gaussian_state({0.9, 0.2, -0.1}, d, 1e-2);
  const FockState res = cubic_phase_state({0.05, 1.0, 1, d, 1e-2});
  const FockState dense = entangler_matrix(d).apply(tensor(in, res));
  EXPECT_LT((c.entangle(in, res).amplitudes() - dense.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(entangler_matrix(d).is_unitary());
}

TEST(Injection, EntanglerShiftsAncillaByMinusX) {
  // Narrow input centred at x1 with a vacuum ancilla: the ancilla's mean position moves to -x1.
  const int d = 40;
  const double x1 = 0.7;
  const InjectionCircuit c({0.05, 0.05, 1.0, d, 1e-2});
  const FockState in = gaussian_state({0.35, x1, 0.0}, d, 1e-6);
  const FockState joint = c.entangle(in, FockState::vacuum(d));
  const std::array<int, 1> keep{1};
  const DensityMatrix anc = partial_trace(DensityMatrix::pure(joint), keep);
  EXPECT_NEAR(anc.expectation(quadrature_power(d, 0.0, 1)), -x1, 1e-6);
  // the ancilla picks up the input's position spread on top of its own 1/2
  const DensityMatrix rho_in = DensityMatrix::pure(in);
  const double in_mean = rho_in.expectation(quadrature_power(d, 0.0, 1));
  const double in_var = rho_in.expectation(quadrature_power(d, 0.0, 2)) - in_mean * in_mean;
  EXPECT_NEAR(in_var, 0.35 * 0.35 / 2, 2e-4);
  const double anc_mean = anc.expectation(quadrature_power(d, 0.0, 1));
  EXPECT_NEAR(anc.expectation(quadrature_power(d, 0.0, 2)) - anc_mean * anc_mean, 0.5 + in_var, 1e-6);
}

TEST(Injection, CorrectionIsUnitary) {
  const InjectionCircuit c(params(0.1, 0.1, 1.0));
  const FockState v = gaussian_state({1.3, -0.4, 0.5}, 24, 1e-6);
  EXPECT_NEAR(c.correct(v, 0.8).norm_squared(), 1.0, 1e-12);
}

TEST(Injection, ImprobableBranchFlag) {
  const InjectionResult r = inject_cubic(FockState::vacuum(24), honest(0.05, 1.5), params(0.05, 0.05, 1.5), 11.0,
                                         nullptr);
  EXPECT_TRUE(r.improbable_branch);
  EXPECT_LT(r.branch_weight, kImprobableBranchDensity);
}

TEST(Injection, TailGateOnInputs) {
  EXPECT_THROW(inject_cubic(FockState::basis(24, 23), honest(0.05, 1.5), params(0.05, 0.05, 1.5), 0.0, nullptr),
               TruncationTooSmall);
}

TEST(Injection, CorrectnessImprovesOnDoublingLadder) {
  double prev = 1.0;
  for (int d : {12, 24, 48}) {
    const InjectionResult r = inject_cubic(FockState::vacuum(d), honest(0.05, 1.5, d, 1e-2),
                                           {0.05, 0.05, 1.5, d, 1e-2}, 0.3, nullptr);
    const double err = 1 - r.fidelity_to_target;
    EXPECT_LT(err, prev) << "D=" << d;
    if (d == 24) EXPECT_LT(err, 1e-3);
    prev = err;
  }
}

TEST(AnalyticTarget, ZeroCubicityIsSmearedInput) {
  const FockState in = gaussian_state({1.0, 0.5, 0.0}, 24, 1e-6);
  const FockState t = analytic_target(in, 0.0, 1.5, 1.0, 0.4);
  // Product of Gaussians: centre (0.5 s^2 - 0.4)/(s^2 + 1), width^-2 = 1 + 1/s^2.
  const double s2 = 2.25;
  const double w = 1 / std::sqrt(1 + 1 / s2);
  const double c = (0.5 * s2 - 0.4) / (s2 + 1);
  const FockState ref = gaussian_state({w, c, 0.0}, 24, 1e-6);
  EXPECT_NEAR(fidelity(ref, t), 1.0, 1e-10);
}

TEST(AnalyticTarget, VacuumAtOriginIsNarrowedCubicState) {
  const double s = 1.5;
  const double g = 0.05;
  const FockState t = analytic_target(FockState::vacuum(24), g, s, 1.0, 0.0);
  const FockState ref = cubic_phase_state({g, 1 / std::sqrt(1 + 1 / (s * s)), 1, 24, 1e-6});
  EXPECT_LT((t.amplitudes() - ref.amplitudes()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AnalyticTarget, LargeSqueezingApproachesExactGate) {
  const FockState in = gaussian_state({1.0, 0.2, 0.1}, 24, 1e-6);
  EXPECT_GE(fidelity(cubic_gate_image(in, 0.1), analytic_target(in, 0.1, 50.0, 1.0, 0.0)), 0.999);
}

TEST(AnalyticTarget, EnvelopeAnnihilatesState) {
  EXPECT_THROW(analytic_target(FockState::vacuum(24), 0.1, 0.05, 1.0, 40.0), ContractViolation);
}

TEST(ChannelCheck, IdenticalStates) {
  const FockState sigma = honest(0.1, 1.0);
  Rng rng(1);
  const ChannelReport rep = channel_fidelity_check(sigma, DensityMatrix::pure(sigma), FockState::vacuum(24),
                                                   params(0.1, 0.1, 1.0), 10, rng);
  for (const auto& b : rep.branches) {
    EXPECT_NEAR(b.fidelity_in, 1.0, 1e-8);
    EXPECT_NEAR(b.fidelity_out, 1.0, 1e-8);
  }
}

TEST(ChannelCheck, OrthogonalMixturesPropagateFidelity) {
  const ResourceSpec r{0.1, 1.0, 1, 24, 1e-6};
  const FockState sigma = cubic_phase_state(r);
  const FockState in = gaussian_state({1.0, 0.0, 0.0}, 24, 1e-6);
  for (double q : {0.1, 0.3, 0.5}) {
    Rng rng(12);
    const ChannelReport rep = channel_fidelity_check(sigma, adversary_state(AdversarySpec::orthogonal_mix(q), r), in,
                                                     params(0.1, 0.1, 1.0), 50, rng, 2);
    EXPECT_NEAR(rep.fidelity_in, 1 - q, 1e-10);
    EXPECT_GE(rep.min_margin, -1e-9) << q;
    EXPECT_GE(rep.min_perp_overlap, -1e-10) << q;
    EXPECT_LT(rep.decomposition_residual, 1e-12);
  }
}

TEST(ChannelCheck, WorkerCountDoesNotChangeBranches) {
  const ResourceSpec r{0.1, 1.0, 1, 24, 1e-6};
  const FockState sigma = cubic_phase_state(r);
  const DensityMatrix rho = adversary_state(AdversarySpec::thermal_mix(0.2), r);
  Rng a(4);
  Rng b(4);
  const auto ra = channel_fidelity_check(sigma, rho, FockState::vacuum(24), params(0.1, 0.1, 1.0), 8, a, 1);
  const auto rb = channel_fidelity_check(sigma, rho, FockState::vacuum(24), params(0.1, 0.1, 1.0), 8, b, 3);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(ra.branches[i].x_meas, rb.branches[i].x_meas);
    EXPECT_EQ(ra.branches[i].fidelity_out, rb.branches[i].fidelity_out);
  }
}
