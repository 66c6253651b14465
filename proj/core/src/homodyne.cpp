#include "cvverify/homodyne.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "cvverify/errors.hpp"

namespace cvv {
namespace {

void require_single_mode(int modes) {
  if (modes != 1) throw DimensionMismatch("homodyne operations act on single-mode states only");
}

void require_cover(const QuadratureGrid& grid, int dimension) {
  if (!grid.covers(dimension)) {
    throw InvalidDimension("quadrature grid x_max too small for the turning point of D=" +
                           std::to_string(dimension));
  }
}

constexpr std::array<double, 4> kWitnessAngles{0.0, std::numbers::pi / 2.0, -std::numbers::pi / 4.0,
                                               std::numbers::pi / 4.0};

}  // namespace

FockState rotate_state(const FockState& state, double theta) {
  require_single_mode(state.mode_count());
  return phase_rotation(state.dimension(), theta).apply(state);
}

DensityMatrix rotate_state(const DensityMatrix& rho, double theta) {
  require_single_mode(rho.mode_count());
  Vector phases(rho.dimension());
  for (int n = 0; n < rho.dimension(); ++n) phases[n] = std::exp(Complex(0.0, -theta * n));
  Matrix out = phases.asDiagonal() * rho.entries() * phases.conjugate().asDiagonal();
  return DensityMatrix(std::move(out));
}

RealVector quadrature_density(const DensityMatrix& rho, const QuadratureGrid& grid) {
  require_single_mode(rho.mode_count());
  require_cover(grid, rho.dimension());
  const Eigen::MatrixXd table = hermite_table(rho.dimension(), grid);
  // p_j = sum_mn phi_m(x_j) rho_mn phi_n(x_j)
  const Matrix weighted = rho.entries() * table.cast<Complex>();
  RealVector density = (table.array() * weighted.real().array()).colwise().sum().transpose();
  return density;
}

RealVector quadrature_density(const FockState& state, const QuadratureGrid& grid) {
  require_single_mode(state.mode_count());
  require_cover(grid, state.dimension());
  return wavefunction_on_grid(state, grid).cwiseAbs2();
}

QuadratureSampler::QuadratureSampler(const DensityMatrix& rho, double theta, const QuadratureGrid& grid)
    : theta_(theta) {
  const RealVector density = quadrature_density(theta == 0.0 ? rho : rotate_state(rho, theta), grid);
  const auto n = static_cast<std::size_t>(grid.size());
  points_.assign(grid.points.data(), grid.points.data() + n);
  cdf_.resize(n);
  cdf_[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double lo = std::max(density[static_cast<Eigen::Index>(j - 1)], 0.0);
    const double hi = std::max(density[static_cast<Eigen::Index>(j)], 0.0);
    cdf_[j] = cdf_[j - 1] + 0.5 * grid.spacing * (lo + hi);
  }
  mass_ = cdf_.back();
  if (!(mass_ > 0.0)) throw ContractViolation("quadrature density has no mass on the grid");
  for (double& c : cdf_) c /= mass_;
  guide_.resize(kGuideSize + 1);
  for (std::size_t k = 0; k <= kGuideSize; ++k) {
    const double u = static_cast<double>(k) / kGuideSize;
    guide_[k] = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }
}

double QuadratureSampler::from_uniform(double u) const {
  // upper_bound(u) lies between the guide entries bracketing u
  const auto k = std::min(static_cast<std::size_t>(u * kGuideSize), kGuideSize - 1);
  const auto first = cdf_.begin() + static_cast<std::ptrdiff_t>(guide_[k]);
  const auto last = cdf_.begin() + static_cast<std::ptrdiff_t>(std::min(guide_[k + 1] + 1, cdf_.size()));
  auto it = std::upper_bound(first, last, u);
  if (it == last) it = std::upper_bound(last, cdf_.end(), u);
  if (it == cdf_.begin()) return points_.front();
  if (it == cdf_.end()) return points_.back();
  const auto j = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[j - 1];
  const double c1 = cdf_[j];
  const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return points_[j - 1] + t * (points_[j] - points_[j - 1]);
}

HomodyneSampler::HomodyneSampler(const DensityMatrix& rho) : HomodyneSampler(rho, kWitnessAngles) {}

HomodyneSampler::HomodyneSampler(const DensityMatrix& rho, std::span<const double> angles) {
  const QuadratureGrid grid = QuadratureGrid::for_dimension(rho.dimension());
  samplers_.reserve(angles.size());
  for (double theta : angles) samplers_.emplace_back(rho, theta, grid);
}

const QuadratureSampler& HomodyneSampler::at(double theta) const {
  for (const auto& s : samplers_) {
    if (std::abs(s.theta() - theta) < 1e-12) return s;
  }
  throw ContractViolation("homodyne sampler has no cached basis at the requested angle");
}

double HomodyneSampler::sample_observable(const ObservableDescriptor& observable, Rng& rng) const {
  const double x = sample_quadrature(observable.angle, rng);
  double value = x;
  for (int k = 1; k < observable.power; ++k) value *= x;
  return observable.scale * value;
}

double sample_quadrature(const DensityMatrix& rho, double theta, Rng& rng) {
  const QuadratureSampler sampler(rho, theta, QuadratureGrid::for_dimension(rho.dimension()));
  return sampler.sample(rng);
}

double sample_observable(const DensityMatrix& rho, const ObservableDescriptor& observable, Rng& rng) {
  const std::array<double, 1> angle{observable.angle};
  return HomodyneSampler(rho, angle).sample_observable(observable, rng);
}

}  // namespace cvv
