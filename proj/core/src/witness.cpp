#include "cvverify/witness.hpp"

#include <cmath>
#include <numbers>

#include "cvverify/errors.hpp"

namespace cvv {
namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kHalfPi = std::numbers::pi / 2.0;
const double kRotatedCubeScale = std::pow(2.0, 1.5);

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

std::string to_string(WitnessTerm term) {
  switch (term) {
    case WitnessTerm::kX2: return "x^2";
    case WitnessTerm::kX4: return "x^4";
    case WitnessTerm::kP2: return "p^2";
    case WitnessTerm::kP3: return "p^3";
    case WitnessTerm::kXMinusP3: return "(x-p)^3";
    case WitnessTerm::kXPlusP3: return "(x+p)^3";
  }
  return "?";
}

ObservableDescriptor ObservableDescriptor::for_term(WitnessTerm term, int mode) {
  switch (term) {
    case WitnessTerm::kX2: return {mode, 0.0, 2, 1.0};
    case WitnessTerm::kX4: return {mode, 0.0, 4, 1.0};
    case WitnessTerm::kP2: return {mode, kHalfPi, 2, 1.0};
    case WitnessTerm::kP3: return {mode, kHalfPi, 3, 1.0};
    case WitnessTerm::kXMinusP3: return {mode, -kQuarterPi, 3, kRotatedCubeScale};
    case WitnessTerm::kXPlusP3: return {mode, kQuarterPi, 3, kRotatedCubeScale};
  }
  throw ContractViolation("unknown witness term");
}

WitnessTerm ObservableDescriptor::term() const {
  for (WitnessTerm t : kWitnessTerms) {
    const ObservableDescriptor d = for_term(t, mode);
    if (near(d.angle, angle) && d.power == power && near(d.scale, scale)) return t;
  }
  throw ContractViolation("observable descriptor is not one of the six legal witness terms");
}

bool ObservableDescriptor::is_legal() const {
  try {
    (void)term();
    return mode >= 0;
  } catch (const ContractViolation&) {
    return false;
  }
}

double WitnessSpec::sum_abs_lambda() const {
  double total = 0.0;
  for (const auto& t : terms) total += std::abs(t.lambda);
  return total;
}

std::array<double, 6> witness_coefficients(double gamma_tilde, double s) {
  const double s2 = s * s;
  const double g = gamma_tilde;
  return {-0.5 / s2, -4.5 * g * g * s2, -0.5 * s2, -g * s2, -0.5 * g * s2, 0.5 * g * s2};
}

WitnessSpec build_witness(const ResourceSpec& resource) {
  resource.validate();
  WitnessSpec spec;
  spec.resource = resource;
  spec.constant = 1.0 + 0.5 * resource.copies;
  const auto lambdas = witness_coefficients(resource.gamma_tilde, resource.s);
  spec.terms.reserve(6 * static_cast<std::size_t>(resource.copies));
  for (int k = 0; k < resource.copies; ++k) {
    for (std::size_t t = 0; t < kWitnessTerms.size(); ++t) {
      spec.terms.push_back({lambdas[t], ObservableDescriptor::for_term(kWitnessTerms[t], k)});
    }
  }
  return spec;
}

Matrix observable_matrix(const ObservableDescriptor& observable, int dimension) {
  (void)observable.term();
  return observable.scale * quadrature_power(dimension, observable.angle, observable.power);
}

Matrix vnv_quadrature_form(double gamma_tilde, double s, int dimension) {
  if (dimension < 8) throw InvalidDimension("vnv_quadrature_form needs D >= 8");
  const double s2 = s * s;
  const double g = gamma_tilde;
  const Matrix x2 = quadrature_power(dimension, 0.0, 2);
  const Matrix x4 = quadrature_power(dimension, 0.0, 4);
  const Matrix p2 = quadrature_power(dimension, kHalfPi, 2);
  const Matrix p3 = quadrature_power(dimension, kHalfPi, 3);
  const Matrix xm3 = kRotatedCubeScale * quadrature_power(dimension, -kQuarterPi, 3);
  const Matrix xp3 = kRotatedCubeScale * quadrature_power(dimension, kQuarterPi, 3);
  return -0.5 * Matrix::Identity(dimension, dimension) + (0.5 / s2) * x2 +
         (0.5 * s2) * (p2 + 9.0 * g * g * x4 + 2.0 * g * p3 + g * (xm3 - xp3));
}

double f_low_exact(const DensityMatrix& rho_single, const WitnessSpec& spec) {
  if (rho_single.mode_count() != 1) throw DimensionMismatch("f_low_exact expects a single-mode state");
  const int dim = rho_single.dimension();
  std::array<double, 6> traces{};
  for (std::size_t t = 0; t < kWitnessTerms.size(); ++t) {
    traces[t] = rho_single.expectation(observable_matrix(ObservableDescriptor::for_term(kWitnessTerms[t], 0), dim));
  }
  double total = spec.constant;
  for (const auto& entry : spec.terms) {
    total += entry.lambda * traces[static_cast<std::size_t>(entry.observable.term())];
  }
  return total;
}

double f_low_exact_joint(const DensityMatrix& rho_joint, const WitnessSpec& spec) {
  if (spec.modes() != 2 || rho_joint.mode_count() != 2) {
    throw DimensionMismatch("f_low_exact_joint supports M = 2 two-mode states only");
  }
  double total = spec.constant;
  for (int mode = 0; mode < 2; ++mode) {
    const std::array<int, 1> keep{mode};
    const DensityMatrix marginal = partial_trace(rho_joint, keep);
    for (const auto& entry : spec.terms) {
      if (entry.observable.mode != mode) continue;
      total += entry.lambda * marginal.expectation(observable_matrix(entry.observable, marginal.dimension()));
    }
  }
  return total;
}

ComplementDecomposition orthogonal_complement(const DensityMatrix& rho_in, const DensityMatrix& sigma_in) {
  const double f = fidelity(sigma_in, rho_in);
  if (f >= 1.0 - 1e-12) {
    throw DegenerateDecomposition("orthogonal_complement: F = 1, complement undefined");
  }
  const int dim = rho_in.dimension();
  const Matrix q = Matrix::Identity(dim, dim) - sigma_in.entries();
  DensityMatrix perp(q * rho_in.entries() * q / (1.0 - f), rho_in.mode_dims());
  const Matrix rebuilt = f * sigma_in.entries() + (1.0 - f) * perp.entries();
  const double residual = max_abs(rho_in.entries() - rebuilt);
  return {std::move(perp), f, residual};
}

}  // namespace cvv
