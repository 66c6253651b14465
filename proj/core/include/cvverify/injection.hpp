#pragma once

#include <optional>
#include <vector>

#include "cvverify/fock.hpp"
#include "cvverify/grid.hpp"
#include "cvverify/rng.hpp"

namespace cvv {

inline constexpr double kImprobableBranchDensity = 1e-12;

/// Gate-teleportation parameters. The computation register and the
/// resource ancilla share truncation `dimension`.
struct InjectionParams {
  double gamma = 0.0;        // target cubicity, known only to the client
  double gamma_tilde = 0.0;  // resource cubicity
  double s = 1.0;            // resource squeezing width
  int dimension = 24;
  double tail_tolerance = 1e-6;

  /// r = (gamma / gamma_tilde)^(1/3). Throws ContractViolation for gamma_tilde = 0.
  double squeeze_ratio() const;
  void validate() const;
};

struct InjectionResult {
  DensityMatrix output;                   // normalized computation-register state
  std::optional<FockState> output_state;  // set when the resource was pure
  double x_meas = 0.0;
  double branch_weight = 0.0;  // probability density of x_meas
  double fidelity_to_target = 0.0;
  bool improbable_branch = false;  // branch_weight below kImprobableBranchDensity
};

/// The client's circuit: S(r) on the input, exp(i x (x) p) onto the resource
/// ancilla, homodyne x on the ancilla, then S^dagger(r) G^{-1}(x_meas) with
/// G^{-1}(x) = exp(-i g x^3) exp(-3 i g x X (X + x)). Gaussian pieces are built
/// once per circuit.
class InjectionCircuit {
 public:
  explicit InjectionCircuit(const InjectionParams& params);

  const InjectionParams& params() const noexcept { return params_; }
  double squeeze_ratio() const noexcept { return r_; }
  int dimension() const noexcept { return params_.dimension; }

  /// exp(i X (x) P) |psi_in'> |resource>, with psi_in' = S(r) psi_in.
  FockState entangle(const FockState& psi_in, const FockState& resource) const;
  /// S^dagger(r) G^{-1}(x_meas) applied to the (unnormalized) conditional state.
  FockState correct(const FockState& conditional, double x_meas) const;
  /// Ancilla marginal of the entangled state(s) for branch sampling.
  DensityMatrix ancilla_marginal(const FockState& psi_in, const DensityMatrix& resource) const;

  /// Runs the circuit. With `x_meas` unset the branch is drawn from the
  /// ancilla marginal with `rng` (required in that case).
  InjectionResult run(const FockState& psi_in, const DensityMatrix& resource, std::optional<double> x_meas,
                      Rng* rng) const;
  InjectionResult run(const FockState& psi_in, const FockState& resource, std::optional<double> x_meas,
                      Rng* rng) const;

  /// Expected output for branch x_meas.
  FockState target(const FockState& psi_in, double x_meas) const;

 private:
  InjectionParams params_;
  double r_;
  Matrix squeeze_;       // S(r)
  Matrix x_vectors_;     // eigenvectors of X
  RealVector x_values_;  // eigenvalues of X
  Matrix p_vectors_;
  RealVector p_values_;
  PositionGrid grid_;
};

/// One-shot convenience wrapper around InjectionCircuit::run.
InjectionResult inject_cubic(const FockState& psi_in, const DensityMatrix& resource, const InjectionParams& params,
                             std::optional<double> x_meas, Rng* rng);
InjectionResult inject_cubic(const FockState& psi_in, const FockState& resource, const InjectionParams& params,
                             std::optional<double> x_meas, Rng* rng);

/// Full D^2 x D^2 entangler exp(i X (x) P) from a direct eigendecomposition.
FockOperator entangler_matrix(int dimension);

/// exp(i gamma x^3) exp(-(x + x_meas/r)^2 r^2 / (2 s^2)) psi_in(x), normalized,
/// evaluated pointwise on the position grid and projected to the Fock basis.
/// Throws ContractViolation when the envelope annihilates the state.
FockState analytic_target(const FockState& psi_in, double gamma, double s, double r, double x_meas);

/// exp(i gamma x^3) psi_in(x) on the grid, normalized.
FockState cubic_gate_image(const FockState& psi_in, double gamma);

struct ChannelBranch {
  double x_meas = 0.0;
  double fidelity_in = 0.0;   // F(sigma, rho)
  double fidelity_out = 0.0;  // F(sigma_out, rho_out)
  double perp_overlap = 0.0;  // Tr(E(sigma_in) E(sigma_perp)); 0 when rho = sigma
  double branch_weight_sigma = 0.0;
  double branch_weight_rho = 0.0;
};

struct ChannelReport {
  std::vector<ChannelBranch> branches;
  double fidelity_in = 0.0;
  double min_margin = 0.0;  // min over branches of fidelity_out - fidelity_in
  double min_perp_overlap = 0.0;
  /// max-norm of rho - (F sigma + (1-F) sigma_perp): coherences the
  /// decomposition cannot express.
  double decomposition_residual = 0.0;
};

/// Runs the circuit on sigma and rho with the same branch, drawn from the
/// sigma run, for `trials` branches.
ChannelReport channel_fidelity_check(const FockState& sigma_resource, const DensityMatrix& rho_resource,
                                     const FockState& psi_in, const InjectionParams& params, int trials, Rng& rng,
                                     int workers = 1);

}  // namespace cvv
