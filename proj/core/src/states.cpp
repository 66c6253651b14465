#include "cvverify/states.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "cvverify/errors.hpp"
#include "cvverify/grid.hpp"

namespace cvv {

void ResourceSpec::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw ContractViolation("resource: s must be positive");
  if (!std::isfinite(gamma_tilde)) throw ContractViolation("resource: gamma_tilde must be finite");
  if (copies < 1) throw ContractViolation("resource: M must be at least 1");
  if (dimension < 2) throw InvalidDimension("resource: truncation dimension must be >= 2");
  if (!(tail_tolerance > 0.0)) throw ContractViolation("resource: tail tolerance must be positive");
}

FockState state_from_wavefunction(const std::function<Complex(double)>& psi, int dimension,
                                  double tail_tolerance) {
  if (dimension < 2) throw InvalidDimension("state dimension must be >= 2");
  const PositionGrid grid = PositionGrid::for_dimension(dimension);
  Vector values(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) values[j] = psi(grid.points[j]);
  Vector coeffs = project_to_fock(values, grid, dimension);
  const double norm = coeffs.norm();
  if (!(norm > 0.0)) throw ContractViolation("wavefunction has no support in the truncated space");
  coeffs /= norm;
  const double tail = std::norm(coeffs[dimension - 1]);
  if (tail >= tail_tolerance) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "truncation D=%d too small: top-level mass %.3e >= %.1e", dimension,
                  tail, tail_tolerance);
    throw TruncationTooSmall(msg, tail, dimension);
  }
  return FockState(std::move(coeffs));
}

FockState cubic_phase_state(const ResourceSpec& spec) {
  spec.validate();
  const double g = spec.gamma_tilde;
  const double inv_two_s2 = 0.5 / (spec.s * spec.s);
  return state_from_wavefunction(
      [=](double x) { return std::exp(Complex(-x * x * inv_two_s2, g * x * x * x)); }, spec.dimension,
      spec.tail_tolerance);
}

std::vector<FockState> resource_block(const ResourceSpec& spec) {
  spec.validate();
  return std::vector<FockState>(static_cast<std::size_t>(spec.copies), cubic_phase_state(spec));
}

FockState gaussian_state(const GaussianInput& input, int dimension, double tail_tolerance) {
  if (!(input.width > 0.0)) throw ContractViolation("gaussian input width must be positive");
  return state_from_wavefunction(
      [=](double x) {
        const double d = x - input.center;
        return std::exp(Complex(-0.5 * d * d / (input.width * input.width), input.momentum * x));
      },
      dimension, tail_tolerance);
}

FockState cubic_orthogonal_state(const ResourceSpec& spec) {
  spec.validate();
  const FockState psi = cubic_phase_state(spec);
  const double g = spec.gamma_tilde;
  const double inv_two_s2 = 0.5 / (spec.s * spec.s);
  const FockState raw = state_from_wavefunction(
      [=](double x) { return x * std::exp(Complex(-x * x * inv_two_s2, g * x * x * x)); }, spec.dimension,
      spec.tail_tolerance);
  // Gram-Schmidt twice against psi.
  Vector v = raw.amplitudes();
  for (int pass = 0; pass < 2; ++pass) v -= psi.amplitudes().dot(v) * psi.amplitudes();
  return FockState(v / v.norm());
}

DensityMatrix thermal_state(int dimension, double mean_photons) {
  if (dimension < 1) throw InvalidDimension("thermal_state: dimension must be positive");
  if (!(mean_photons >= 0.0)) throw ContractViolation("thermal_state: mean photon number must be >= 0");
  Matrix rho = Matrix::Zero(dimension, dimension);
  const double ratio = mean_photons / (1.0 + mean_photons);
  double total = 0.0;
  for (int n = 0; n < dimension; ++n) {
    const double pn = std::pow(ratio, n) / (1.0 + mean_photons);
    rho(n, n) = pn;
    total += pn;
  }
  rho /= total;
  return DensityMatrix(std::move(rho));
}

// ------------------------------------------------------------- adversaries

namespace {

constexpr std::array<std::pair<AdversaryKind, const char*>, 6> kAdversaryNames{{
    {AdversaryKind::kHonest, "honest"},
    {AdversaryKind::kWrongGamma, "wrong_gamma"},
    {AdversaryKind::kGaussianOnly, "gaussian_only"},
    {AdversaryKind::kVacuum, "vacuum"},
    {AdversaryKind::kThermalMix, "thermal_mix"},
    {AdversaryKind::kOrthogonalMix, "orthogonal_mix"},
}};

}  // namespace

std::string to_string(AdversaryKind kind) {
  for (const auto& [k, name] : kAdversaryNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

AdversaryKind adversary_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kAdversaryNames) {
    if (name == n) return k;
  }
  throw ConfigError("unknown adversary kind '" + name + "'");
}

bool AdversarySpec::has_parameter() const {
  return kind == AdversaryKind::kWrongGamma || kind == AdversaryKind::kThermalMix ||
         kind == AdversaryKind::kOrthogonalMix;
}

std::string AdversarySpec::label() const {
  if (!has_parameter()) return to_string(kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%g)", to_string(kind).c_str(), parameter);
  return buf;
}

void AdversarySpec::validate() const {
  if (kind == AdversaryKind::kThermalMix || kind == AdversaryKind::kOrthogonalMix) {
    if (!(parameter >= 0.0 && parameter <= 1.0)) {
      throw ConfigError(label() + ": mixing weight must lie in [0, 1]");
    }
  }
  if (kind == AdversaryKind::kWrongGamma && !std::isfinite(parameter)) {
    throw ConfigError("wrong_gamma: cubicity must be finite");
  }
}

DensityMatrix adversary_state(const AdversarySpec& adversary, const ResourceSpec& resource) {
  adversary.validate();
  resource.validate();
  const int dim = resource.dimension;
  switch (adversary.kind) {
    case AdversaryKind::kHonest:
      return DensityMatrix::pure(cubic_phase_state(resource));
    case AdversaryKind::kWrongGamma: {
      ResourceSpec wrong = resource;
      wrong.gamma_tilde = adversary.parameter;
      return DensityMatrix::pure(cubic_phase_state(wrong));
    }
    case AdversaryKind::kGaussianOnly: {
      ResourceSpec gaussian = resource;
      gaussian.gamma_tilde = 0.0;
      return DensityMatrix::pure(cubic_phase_state(gaussian));
    }
    case AdversaryKind::kVacuum:
      return DensityMatrix::pure(FockState::vacuum(dim));
    case AdversaryKind::kThermalMix: {
      const FockState psi = cubic_phase_state(resource);
      const double mean_n = (psi.amplitudes().cwiseAbs2().array() *
                             RealVector::LinSpaced(dim, 0.0, dim - 1.0).array())
                                .sum();
      const std::array<double, 2> w{1.0 - adversary.parameter, adversary.parameter};
      const std::array<DensityMatrix, 2> parts{DensityMatrix::pure(psi), thermal_state(dim, mean_n)};
      return DensityMatrix::mixture(w, parts);
    }
    case AdversaryKind::kOrthogonalMix: {
      const std::array<double, 2> w{1.0 - adversary.parameter, adversary.parameter};
      const std::array<DensityMatrix, 2> parts{DensityMatrix::pure(cubic_phase_state(resource)),
                                               DensityMatrix::pure(cubic_orthogonal_state(resource))};
      return DensityMatrix::mixture(w, parts);
    }
  }
  throw ConfigError("unhandled adversary kind");
}

}  // namespace cvv
