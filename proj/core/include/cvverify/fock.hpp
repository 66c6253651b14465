#pragma once

// Truncated Fock-space linear algebra. Conventions: hbar = 1, [x, p] = i,
// x = (a + a^dagger)/sqrt(2). Multi-mode objects use Kronecker ordering with
// mode 0 as the most significant index.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

class FockState {
 public:
  FockState(Vector amplitudes, std::vector<int> mode_dims);
  explicit FockState(Vector amplitudes);  // single mode

  static FockState basis(int dimension, int n);
  static FockState vacuum(int dimension) { return basis(dimension, 0); }

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](Eigen::Index n) const { return amplitudes_[n]; }
  const std::vector<int>& mode_dims() const noexcept { return mode_dims_; }
  int mode_count() const noexcept { return static_cast<int>(mode_dims_.size()); }
  int dimension() const noexcept { return static_cast<int>(amplitudes_.size()); }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  FockState normalized() const;

  /// Largest marginal population of the top Fock level over all modes.
  double tail_mass() const;

 private:
  Vector amplitudes_;
  std::vector<int> mode_dims_;
};

class FockOperator {
 public:
  FockOperator(Matrix entries, std::vector<int> mode_dims);
  explicit FockOperator(Matrix entries);  // single mode

  static FockOperator identity(int dimension);

  const Matrix& entries() const noexcept { return entries_; }
  const std::vector<int>& mode_dims() const noexcept { return mode_dims_; }
  int mode_count() const noexcept { return static_cast<int>(mode_dims_.size()); }
  int dimension() const noexcept { return static_cast<int>(entries_.rows()); }

  bool is_hermitian(double tol = kHermitianTolerance) const;
  bool is_unitary(double tol = kUnitaryTolerance) const;

  FockOperator adjoint() const { return FockOperator(entries_.adjoint(), mode_dims_); }
  FockState apply(const FockState& state) const;

  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);

 private:
  Matrix entries_;
  std::vector<int> mode_dims_;
};

class DensityMatrix {
 public:
  /// Shape checks only; call validate() for the trace/PSD invariants.
  DensityMatrix(Matrix entries, std::vector<int> mode_dims);
  explicit DensityMatrix(Matrix entries);

  static DensityMatrix pure(const FockState& state);
  /// sum_k w_k rho_k; weights must be non-negative and sum to 1.
  static DensityMatrix mixture(std::span<const double> weights,
                               std::span<const DensityMatrix> parts);

  const Matrix& entries() const noexcept { return entries_; }
  const std::vector<int>& mode_dims() const noexcept { return mode_dims_; }
  int mode_count() const noexcept { return static_cast<int>(mode_dims_.size()); }
  int dimension() const noexcept { return static_cast<int>(entries_.rows()); }

  Complex trace() const { return entries_.trace(); }
  double purity() const;
  double min_eigenvalue() const;
  /// Throws ContractViolation unless Hermitian, unit trace and PSD (to 1e-10).
  void validate(double tol = kTraceTolerance) const;

  double expectation(const Matrix& op) const;

 private:
  Matrix entries_;
  std::vector<int> mode_dims_;
};

struct Quadratures {
  FockOperator x;
  FockOperator p;
  FockOperator n;
};

/// Truncated x, p and n. Throws InvalidDimension for dimension < 2.
Quadratures build_quadratures(int dimension);

/// Matrix of (cos(theta) x + sin(theta) p)^power restricted to the first
/// `dimension` levels. Built at dimension + power and cropped, so every
/// returned element equals the untruncated one.
Matrix quadrature_power(int dimension, double theta, int power);

/// exp(i * scale * H) by eigendecomposition.
FockOperator hermitian_exponential(const FockOperator& generator, double scale);

/// f(H) by eigendecomposition for Hermitian H.
FockOperator hermitian_function(const FockOperator& generator,
                                const std::function<Complex(double)>& f);

/// Single-mode squeezer with S^dagger x S = s x; S(s)|0> has Var(x) = s^2/2.
FockOperator squeezer(int dimension, double s);

/// exp(-i theta n).
FockOperator phase_rotation(int dimension, double theta);

FockOperator tensor(const FockOperator& a, const FockOperator& b);
FockState tensor(const FockState& a, const FockState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

struct Projection {
  FockState state;  // unnormalized conditional state of the remaining modes
  double weight;    // squared norm of `state`
};

/// Contract mode `mode` of a two-mode pure state with <bra|.
Projection project_ancilla(const FockState& joint, const Vector& bra, int mode = 1);

/// Tr(sigma rho) for pure sigma. Throws ContractViolation if Tr(sigma^2) is
/// not 1 within 1e-8.
double fidelity(const DensityMatrix& sigma, const DensityMatrix& rho);
double fidelity(const FockState& sigma, const DensityMatrix& rho);
double fidelity(const FockState& sigma, const FockState& rho);

/// Entrywise max |a_ij|.
double max_abs(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace cvv
