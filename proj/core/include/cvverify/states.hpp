#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cvverify/fock.hpp"

namespace cvv {

inline constexpr double kDefaultTailTolerance = 1e-8;

/// Parameters of the requested resource: M copies of the single-mode state
/// psi(x) ~ exp(i gamma_tilde x^3) exp(-x^2 / (2 s^2)) at truncation D.
struct ResourceSpec {
  double gamma_tilde = 0.0;
  double s = 1.0;
  int copies = 1;
  int dimension = 40;
  double tail_tolerance = kDefaultTailTolerance;

  void validate() const;
};

/// Gaussian single-mode wavefunction exp(-(x - center)^2 / (2 width^2) + i momentum x).
struct GaussianInput {
  double width = 1.0;
  double center = 0.0;
  double momentum = 0.0;
};

/// Projects a position-space wavefunction onto the first `dimension` Fock
/// levels by grid quadrature and normalizes. Throws TruncationTooSmall when
/// |c_{D-1}|^2 exceeds `tail_tolerance`.
FockState state_from_wavefunction(const std::function<Complex(double)>& psi, int dimension,
                                  double tail_tolerance);

FockState cubic_phase_state(const ResourceSpec& spec);

/// M copies of cubic_phase_state(spec). Throws ContractViolation for M < 1.
std::vector<FockState> resource_block(const ResourceSpec& spec);

FockState gaussian_state(const GaussianInput& input, int dimension,
                         double tail_tolerance = kDefaultTailTolerance);

/// Cubic-phase image of |1>: exp(i g x^3) x exp(-x^2/(2 s^2)), orthogonalized
/// against cubic_phase_state(spec) in the truncated space.
FockState cubic_orthogonal_state(const ResourceSpec& spec);

DensityMatrix thermal_state(int dimension, double mean_photons);

enum class AdversaryKind { kHonest, kWrongGamma, kGaussianOnly, kVacuum, kThermalMix, kOrthogonalMix };

/// A dishonest-server preparation. `parameter` is gamma_tilde' for
/// kWrongGamma, the noise weight p for kThermalMix, the weight q for
/// kOrthogonalMix, and unused otherwise.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kHonest;
  double parameter = 0.0;

  static AdversarySpec honest() { return {}; }
  static AdversarySpec wrong_gamma(double g) { return {AdversaryKind::kWrongGamma, g}; }
  static AdversarySpec gaussian_only() { return {AdversaryKind::kGaussianOnly, 0.0}; }
  static AdversarySpec vacuum() { return {AdversaryKind::kVacuum, 0.0}; }
  static AdversarySpec thermal_mix(double p) { return {AdversaryKind::kThermalMix, p}; }
  static AdversarySpec orthogonal_mix(double q) { return {AdversaryKind::kOrthogonalMix, q}; }

  bool has_parameter() const;
  std::string label() const;
  void validate() const;
};

std::string to_string(AdversaryKind kind);
/// Throws ConfigError for unknown names.
AdversaryKind adversary_kind_from_string(const std::string& name);

/// Single-mode state Bob hands over per copy.
DensityMatrix adversary_state(const AdversarySpec& adversary, const ResourceSpec& resource);

}  // namespace cvv
