#pragma once

#include <span>
#include <vector>

#include "cvverify/fock.hpp"

namespace cvv {

inline constexpr int kDefaultGridPoints = 1 << 14;

/// Uniform position grid on [-x_max, x_max] with trapezoid weights.
struct PositionGrid {
  RealVector points;
  RealVector weights;
  double x_max = 0.0;
  double spacing = 0.0;

  static PositionGrid uniform(double x_max, int count = kDefaultGridPoints);
  /// x_max = sqrt(2 D) + 5: past the classical turning point of every level < D.
  static PositionGrid for_dimension(int dimension, int count = kDefaultGridPoints);

  Eigen::Index size() const noexcept { return points.size(); }
  /// True when x_max clears the turning point sqrt(2D + 1) of level D-1 by `margin`.
  bool covers(int dimension, double margin = 3.0) const;
};

/// phi_0(x) .. phi_{D-1}(x) by the stable three-term recurrence.
RealVector hermite_functions(int dimension, double x);

/// D x G table of phi_n(points[j]).
Eigen::MatrixXd hermite_table(int dimension, const PositionGrid& grid);

/// psi(x_j) = sum_n c_n phi_n(x_j) for a single-mode state.
Vector wavefunction_on_grid(const FockState& state, const PositionGrid& grid);

/// c_n = sum_j w_j phi_n(x_j) psi(x_j); unnormalized.
Vector project_to_fock(const Vector& values, const PositionGrid& grid, int dimension);

}  // namespace cvv
