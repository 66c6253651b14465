#include "cvverify/grid.hpp"

#include <cmath>
#include <numbers>

#include "cvverify/errors.hpp"

namespace cvv {

PositionGrid PositionGrid::uniform(double x_max, int count) {
  if (count < 3 || !(x_max > 0.0)) throw InvalidDimension("position grid needs x_max > 0 and >= 3 points");
  PositionGrid g;
  g.x_max = x_max;
  g.spacing = 2.0 * x_max / (count - 1);
  g.points = RealVector::LinSpaced(count, -x_max, x_max);
  g.weights = RealVector::Constant(count, g.spacing);
  g.weights[0] *= 0.5;
  g.weights[count - 1] *= 0.5;
  return g;
}

PositionGrid PositionGrid::for_dimension(int dimension, int count) {
  if (dimension < 1) throw InvalidDimension("grid dimension must be positive");
  return uniform(std::sqrt(2.0 * dimension) + 5.0, count);
}

bool PositionGrid::covers(int dimension, double margin) const {
  return x_max >= std::sqrt(2.0 * dimension + 1.0) + margin;
}

RealVector hermite_functions(int dimension, double x) {
  RealVector phi(dimension);
  phi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (dimension > 1) phi[1] = std::sqrt(2.0) * x * phi[0];
  for (int n = 1; n + 1 < dimension; ++n) {
    phi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * phi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * phi[n - 1];
  }
  return phi;
}

Eigen::MatrixXd hermite_table(int dimension, const PositionGrid& grid) {
  Eigen::MatrixXd table(dimension, grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) table.col(j) = hermite_functions(dimension, grid.points[j]);
  return table;
}

Vector wavefunction_on_grid(const FockState& state, const PositionGrid& grid) {
  if (state.mode_count() != 1) throw DimensionMismatch("wavefunction_on_grid expects a single mode");
  const Eigen::MatrixXd table = hermite_table(state.dimension(), grid);
  return table.transpose().cast<Complex>() * state.amplitudes();
}

Vector project_to_fock(const Vector& values, const PositionGrid& grid, int dimension) {
  if (values.size() != grid.size()) throw DimensionMismatch("project_to_fock: value/grid size mismatch");
  const Eigen::MatrixXd table = hermite_table(dimension, grid);
  const Vector weighted = values.cwiseProduct(grid.weights.cast<Complex>());
  return table.cast<Complex>() * weighted;
}

}  // namespace cvv
