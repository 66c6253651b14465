#pragma once

#include <span>
#include <vector>

#include "cvverify/fock.hpp"
#include "cvverify/grid.hpp"
#include "cvverify/rng.hpp"
#include "cvverify/witness.hpp"

namespace cvv {

using QuadratureGrid = PositionGrid;

/// Pre-rotation for measuring x_theta = cos(theta) x + sin(theta) p:
/// amplitudes[n] *= exp(-i n theta). Measuring x on the result is
/// equivalent to measuring x_theta on the input.
FockState rotate_state(const FockState& state, double theta);
DensityMatrix rotate_state(const DensityMatrix& rho, double theta);

/// <x|rho|x> at every grid point. Throws InvalidDimension if the grid does
/// not reach past the turning point of the top Fock level.
RealVector quadrature_density(const DensityMatrix& rho, const QuadratureGrid& grid);
RealVector quadrature_density(const FockState& state, const QuadratureGrid& grid);

/// Inverse-CDF sampler for the x_theta statistics of one state. Immutable
/// after construction.
class QuadratureSampler {
 public:
  QuadratureSampler(const DensityMatrix& rho, double theta, const QuadratureGrid& grid);

  double theta() const noexcept { return theta_; }
  /// Grid integral of the density before normalization.
  double mass() const noexcept { return mass_; }

  double sample(Rng& rng) const { return from_uniform(uniform01(rng)); }
  /// Inverse CDF with linear interpolation between grid points.
  double from_uniform(double u) const;

 private:
  double theta_;
  double mass_;
  std::vector<double> points_;
  std::vector<double> cdf_;
  static constexpr std::size_t kGuideSize = 1024;
  std::vector<std::size_t> guide_;  // guide_[k] = upper_bound(cdf_, k / kGuideSize)
};

/// Samplers for the four witness bases {0, pi/2, -pi/4, +pi/4} of one
/// single-mode state.
class HomodyneSampler {
 public:
  explicit HomodyneSampler(const DensityMatrix& rho);
  HomodyneSampler(const DensityMatrix& rho, std::span<const double> angles);

  const QuadratureSampler& at(double theta) const;
  double sample_quadrature(double theta, Rng& rng) const { return at(theta).sample(rng); }
  /// One realization of scale * x_angle^power.
  double sample_observable(const ObservableDescriptor& observable, Rng& rng) const;

 private:
  std::vector<QuadratureSampler> samplers_;
};

double sample_quadrature(const DensityMatrix& rho, double theta, Rng& rng);
double sample_observable(const DensityMatrix& rho, const ObservableDescriptor& observable, Rng& rng);

}  // namespace cvv
