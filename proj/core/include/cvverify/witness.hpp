#pragma once

#include <array>
#include <string>
#include <vector>

#include "cvverify/fock.hpp"
#include "cvverify/states.hpp"

namespace cvv {

/// The six single-mode terms of the witness, in table order.
enum class WitnessTerm { kX2, kX4, kP2, kP3, kXMinusP3, kXPlusP3 };

inline constexpr std::array<WitnessTerm, 6> kWitnessTerms{
    WitnessTerm::kX2, WitnessTerm::kX4, WitnessTerm::kP2,
    WitnessTerm::kP3, WitnessTerm::kXMinusP3, WitnessTerm::kXPlusP3};

std::string to_string(WitnessTerm term);

/// One homodyne-measurable observable: scale * x_angle^power on `mode`,
/// with x_angle = cos(angle) x + sin(angle) p.
struct ObservableDescriptor {
  int mode = 0;
  double angle = 0.0;
  int power = 2;
  double scale = 1.0;

  static ObservableDescriptor for_term(WitnessTerm term, int mode);
  /// Recovers the term, or throws ContractViolation for an illegal triple.
  WitnessTerm term() const;
  bool is_legal() const;
};

struct WitnessEntry {
  double lambda;
  ObservableDescriptor observable;
};

/// W = constant * I + sum_i lambda_i f_i over 6M single-mode terms.
struct WitnessSpec {
  ResourceSpec resource;
  std::vector<WitnessEntry> terms;
  double constant = 1.0;

  int modes() const noexcept { return resource.copies; }
  double sum_abs_lambda() const;
};

/// Per-mode coefficients {x^2, x^4, p^2, p^3, (x-p)^3, (x+p)^3} of
/// -V n V^dagger for V|0> = exp(i g x^3) exp(-x^2/(2 s^2)) (normalized):
/// {-1/(2s^2), -9 g^2 s^2/2, -s^2/2, -g s^2, -g s^2/2, +g s^2/2}.
std::array<double, 6> witness_coefficients(double gamma_tilde, double s);

WitnessSpec build_witness(const ResourceSpec& resource);

/// Exact matrix of scale * x_angle^power on the first D levels.
Matrix observable_matrix(const ObservableDescriptor& observable, int dimension);

/// V n V^dagger = -1/2 + x^2/(2 s^2) + (s^2/2)(p^2 + 9 g^2 x^4 + 2 g p^3 + g((x-p)^3 - (x+p)^3)).
Matrix vnv_quadrature_form(double gamma_tilde, double s, int dimension);

/// Tr(W rho^{(x)M}) for M identical single-mode copies.
double f_low_exact(const DensityMatrix& rho_single, const WitnessSpec& spec);

/// Tr(W rho) for a correlated two-mode state (M = 2 only).
double f_low_exact_joint(const DensityMatrix& rho_joint, const WitnessSpec& spec);

struct ComplementDecomposition {
  DensityMatrix sigma_perp;
  double fidelity;
  /// || rho - (F sigma + (1 - F) sigma_perp) ||_max; zero when rho has no
  /// coherences between sigma and its complement.
  double residual;
};

/// sigma_perp = (I - sigma) rho (I - sigma) / (1 - F). Throws
/// DegenerateDecomposition when F >= 1 - 1e-12.
ComplementDecomposition orthogonal_complement(const DensityMatrix& rho_in, const DensityMatrix& sigma_in);

}  // namespace cvv
