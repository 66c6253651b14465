#include "cvverify/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvverify/errors.hpp"

namespace cvv {
namespace {

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

void check_dims(Eigen::Index size, const std::vector<int>& dims, const char* what) {
  if (dims.empty() || std::any_of(dims.begin(), dims.end(), [](int d) { return d < 1; })) {
    throw InvalidDimension(std::string(what) + ": mode dimensions must be positive");
  }
  if (product(dims) != size) {
    throw DimensionMismatch(std::string(what) + ": size " + std::to_string(size) +
                            " does not match the product of mode dimensions");
  }
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// ---------------------------------------------------------------- FockState

FockState::FockState(Vector amplitudes, std::vector<int> mode_dims)
    : amplitudes_(std::move(amplitudes)), mode_dims_(std::move(mode_dims)) {
  check_dims(amplitudes_.size(), mode_dims_, "FockState");
}

FockState::FockState(Vector amplitudes)
    : FockState(amplitudes, {static_cast<int>(amplitudes.size())}) {}

FockState FockState::basis(int dimension, int n) {
  if (dimension < 1 || n < 0 || n >= dimension) {
    throw InvalidDimension("basis state |" + std::to_string(n) + "> outside dimension " +
                           std::to_string(dimension));
  }
  Vector v = Vector::Zero(dimension);
  v[n] = 1.0;
  return FockState(std::move(v));
}

FockState FockState::normalized() const {
  const double norm = amplitudes_.norm();
  if (norm == 0.0) throw ContractViolation("cannot normalize the zero vector");
  return FockState(amplitudes_ / norm, mode_dims_);
}

double FockState::tail_mass() const {
  double worst = 0.0;
  int stride = dimension();
  for (int d : mode_dims_) {
    stride /= d;
    double mass = 0.0;
    for (Eigen::Index idx = 0; idx < amplitudes_.size(); ++idx) {
      if ((idx / stride) % d == d - 1) mass += std::norm(amplitudes_[idx]);
    }
    worst = std::max(worst, mass);
  }
  return worst / std::max(norm_squared(), 1e-300);
}

// ------------------------------------------------------------- FockOperator

FockOperator::FockOperator(Matrix entries, std::vector<int> mode_dims)
    : entries_(std::move(entries)), mode_dims_(std::move(mode_dims)) {
  if (entries_.rows() != entries_.cols()) throw DimensionMismatch("FockOperator must be square");
  check_dims(entries_.rows(), mode_dims_, "FockOperator");
}

FockOperator::FockOperator(Matrix entries)
    : FockOperator(entries, {static_cast<int>(entries.rows())}) {}

FockOperator FockOperator::identity(int dimension) {
  return FockOperator(Matrix::Identity(dimension, dimension));
}

bool FockOperator::is_hermitian(double tol) const {
  return max_abs(entries_ - entries_.adjoint()) < tol * std::max(1.0, max_abs(entries_));
}

bool FockOperator::is_unitary(double tol) const {
  const Matrix eye = Matrix::Identity(dimension(), dimension());
  return max_abs(entries_.adjoint() * entries_ - eye) < tol;
}

FockState FockOperator::apply(const FockState& state) const {
  if (state.dimension() != dimension()) throw DimensionMismatch("operator/state dimension mismatch");
  return FockState(entries_ * state.amplitudes(), mode_dims_);
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("operator product dimension mismatch");
  return FockOperator(a.entries_ * b.entries_, a.mode_dims_);
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries, std::vector<int> mode_dims)
    : entries_(std::move(entries)), mode_dims_(std::move(mode_dims)) {
  if (entries_.rows() != entries_.cols()) throw DimensionMismatch("DensityMatrix must be square");
  check_dims(entries_.rows(), mode_dims_, "DensityMatrix");
}

DensityMatrix::DensityMatrix(Matrix entries)
    : DensityMatrix(entries, {static_cast<int>(entries.rows())}) {}

DensityMatrix DensityMatrix::pure(const FockState& state) {
  const FockState psi = state.normalized();
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.mode_dims());
}

DensityMatrix DensityMatrix::mixture(std::span<const double> weights,
                                     std::span<const DensityMatrix> parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    throw DimensionMismatch("mixture: weights and parts must be non-empty and of equal length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw ContractViolation("mixture weight outside [0, 1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ContractViolation("mixture weights must sum to 1");
  Matrix sum = Matrix::Zero(parts[0].dimension(), parts[0].dimension());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].dimension() != parts[0].dimension()) throw DimensionMismatch("mixture dimension mismatch");
    sum += weights[k] * parts[k].entries();
  }
  return DensityMatrix(std::move(sum), parts[0].mode_dims());
}

double DensityMatrix::purity() const {
  return (entries_ * entries_).trace().real();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double tol) const {
  if (max_abs(entries_ - entries_.adjoint()) > tol) {
    throw ContractViolation("density matrix is not Hermitian");
  }
  if (std::abs(trace() - Complex(1.0)) > tol) {
    throw ContractViolation("density matrix trace " + std::to_string(trace().real()) + " != 1");
  }
  if (min_eigenvalue() < -tol) throw ContractViolation("density matrix is not positive semidefinite");
}

double DensityMatrix::expectation(const Matrix& op) const {
  if (op.rows() != entries_.rows()) throw DimensionMismatch("expectation: dimension mismatch");
  // Tr(op * rho) = sum_ij op_ij rho_ji
  return (op.cwiseProduct(entries_.transpose())).sum().real();
}

// --------------------------------------------------------------- operators

Quadratures build_quadratures(int dimension) {
  if (dimension < 2) {
    throw InvalidDimension("quadratures need dimension >= 2, got " + std::to_string(dimension));
  }
  Matrix a = Matrix::Zero(dimension, dimension);
  for (int n = 0; n + 1 < dimension; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix x = (a + a.adjoint()) * inv_sqrt2;
  Matrix p = (a - a.adjoint()) * Complex(0.0, -inv_sqrt2);
  Matrix n = Matrix::Zero(dimension, dimension);
  for (int k = 0; k < dimension; ++k) n(k, k) = static_cast<double>(k);
  return {FockOperator(std::move(x)), FockOperator(std::move(p)), FockOperator(std::move(n))};
}

Matrix quadrature_power(int dimension, double theta, int power) {
  if (dimension < 1) throw InvalidDimension("quadrature_power: dimension must be positive");
  if (power < 0) throw ContractViolation("quadrature_power: negative power");
  if (power == 0) return Matrix::Identity(dimension, dimension);
  const int padded = dimension + power + 1;
  const Quadratures q = build_quadratures(padded);
  double c = std::cos(theta);
  double s = std::sin(theta);
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  const Matrix rotated = c * q.x.entries() + s * q.p.entries();
  Matrix acc = rotated;
  for (int k = 1; k < power; ++k) acc = acc * rotated;
  return acc.topLeftCorner(dimension, dimension);
}

FockOperator hermitian_function(const FockOperator& generator,
                                const std::function<Complex(double)>& f) {
  if (!generator.is_hermitian()) {
    throw ContractViolation("hermitian_function: generator is not Hermitian");
  }
  const Matrix herm = 0.5 * (generator.entries() + generator.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  const Matrix& vecs = solver.eigenvectors();
  Vector diag(vecs.cols());
  for (Eigen::Index k = 0; k < diag.size(); ++k) diag[k] = f(solver.eigenvalues()[k]);
  return FockOperator(vecs * diag.asDiagonal() * vecs.adjoint(), generator.mode_dims());
}

FockOperator hermitian_exponential(const FockOperator& generator, double scale) {
  return hermitian_function(generator, [scale](double lambda) {
    return std::exp(Complex(0.0, scale * lambda));
  });
}

FockOperator squeezer(int dimension, double s) {
  if (!(s > 0.0)) throw ContractViolation("squeezer: s must be positive");
  const Quadratures q = build_quadratures(dimension);
  const Matrix xp = q.x.entries() * q.p.entries();
  return hermitian_exponential(FockOperator(xp + xp.adjoint()), -0.5 * std::log(s));
}

FockOperator phase_rotation(int dimension, double theta) {
  Vector phases(dimension);
  for (int n = 0; n < dimension; ++n) phases[n] = std::exp(Complex(0.0, -theta * n));
  return FockOperator(Matrix(phases.asDiagonal()));
}

FockOperator tensor(const FockOperator& a, const FockOperator& b) {
  return FockOperator(kron(a.entries(), b.entries()), concat(a.mode_dims(), b.mode_dims()));
}

FockState tensor(const FockState& a, const FockState& b) {
  Vector out(a.dimension() * b.dimension());
  for (int i = 0; i < a.dimension(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * b.dimension(), b.dimension()) = a[i] * b.amplitudes();
  }
  return FockState(std::move(out), concat(a.mode_dims(), b.mode_dims()));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.entries(), b.entries()), concat(a.mode_dims(), b.mode_dims()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto& dims = rho.mode_dims();
  const int modes = rho.mode_count();
  std::vector<bool> kept(modes, false);
  for (int k : keep) {
    if (k < 0 || k >= modes) throw DimensionMismatch("partial_trace: mode index out of range");
    kept[k] = true;
  }
  std::vector<int> keep_dims;
  std::vector<int> trace_dims;
  for (int m = 0; m < modes; ++m) (kept[m] ? keep_dims : trace_dims).push_back(dims[m]);
  if (keep_dims.empty()) throw DimensionMismatch("partial_trace: must keep at least one mode");
  const int keep_size = product(keep_dims);
  const int trace_size = trace_dims.empty() ? 1 : product(trace_dims);

  std::vector<int> strides(modes, 1);
  for (int m = modes - 2; m >= 0; --m) strides[m] = strides[m + 1] * dims[m + 1];

  // full index for (kept multi-index a, traced multi-index t)
  auto full_index = [&](int a, int t) {
    int idx = 0;
    for (int m = modes - 1; m >= 0; --m) {
      int digit;
      if (kept[m]) {
        digit = a % dims[m];
        a /= dims[m];
      } else {
        digit = t % dims[m];
        t /= dims[m];
      }
      idx += digit * strides[m];
    }
    return idx;
  };

  Matrix out = Matrix::Zero(keep_size, keep_size);
  const Matrix& e = rho.entries();
  for (int a = 0; a < keep_size; ++a) {
    for (int b = 0; b < keep_size; ++b) {
      Complex acc = 0.0;
      for (int t = 0; t < trace_size; ++t) acc += e(full_index(a, t), full_index(b, t));
      out(a, b) = acc;
    }
  }
  return DensityMatrix(std::move(out), std::move(keep_dims));
}

Projection project_ancilla(const FockState& joint, const Vector& bra, int mode) {
  if (joint.mode_count() != 2) throw DimensionMismatch("project_ancilla expects a two-mode state");
  if (mode != 0 && mode != 1) throw DimensionMismatch("project_ancilla: mode must be 0 or 1");
  const int d0 = joint.mode_dims()[0];
  const int d1 = joint.mode_dims()[1];
  if (bra.size() != (mode == 1 ? d1 : d0)) throw DimensionMismatch("project_ancilla: bra size mismatch");
  // Row-major view: psi(i, j) = amplitudes[i * d1 + j].
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      psi(joint.amplitudes().data(), d0, d1);
  Vector out = mode == 1 ? Vector(psi * bra.conjugate()) : Vector(psi.transpose() * bra.conjugate());
  const double weight = out.squaredNorm();
  return {FockState(std::move(out)), weight};
}

double fidelity(const DensityMatrix& sigma, const DensityMatrix& rho) {
  if (sigma.dimension() != rho.dimension()) throw DimensionMismatch("fidelity: dimension mismatch");
  if (std::abs(sigma.purity() - 1.0) > 1e-8) {
    throw ContractViolation("fidelity: first argument must be a pure state");
  }
  return rho.expectation(sigma.entries());
}

double fidelity(const FockState& sigma, const DensityMatrix& rho) {
  if (sigma.dimension() != rho.dimension()) throw DimensionMismatch("fidelity: dimension mismatch");
  if (std::abs(sigma.norm_squared() - 1.0) > 1e-8) {
    throw ContractViolation("fidelity: pure state must be normalized");
  }
  const Vector& v = sigma.amplitudes();
  return v.dot(rho.entries() * v).real();
}

double fidelity(const FockState& sigma, const FockState& rho) {
  if (sigma.dimension() != rho.dimension()) throw DimensionMismatch("fidelity: dimension mismatch");
  if (std::abs(sigma.norm_squared() - 1.0) > 1e-8) {
    throw ContractViolation("fidelity: pure state must be normalized");
  }
  return std::norm(sigma.amplitudes().dot(rho.amplitudes()));
}

}  // namespace cvv
