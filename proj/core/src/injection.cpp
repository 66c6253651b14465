#include "cvverify/injection.hpp"

#include <cmath>
#include <string>

#include "cvverify/errors.hpp"
#include "cvverify/homodyne.hpp"
#include "cvverify/parallel.hpp"
#include "cvverify/witness.hpp"

namespace cvv {
namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kBranchGridPoints = 1 << 12;

struct Component {
  double weight;
  FockState state;
};

std::vector<Component> pure_components(const DensityMatrix& rho) {
  const Matrix herm = 0.5 * (rho.entries() + rho.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  std::vector<Component> out;
  for (Eigen::Index k = solver.eigenvalues().size() - 1; k >= 0; --k) {
    const double w = solver.eigenvalues()[k];
    if (w <= 1e-14) continue;
    out.push_back({w, FockState(Vector(solver.eigenvectors().col(k)))});
  }
  return out;
}

void check_tail(double tail, double tol, int dim, const char* what) {
  if (tail >= tol) {
    throw TruncationTooSmall(std::string(what) + ": top-level mass " + std::to_string(tail) +
                                 " exceeds the injection tail tolerance at D=" + std::to_string(dim),
                             tail, dim);
  }
}

Vector on_grid_then_back(const FockState& psi_in, const std::function<Complex(double)>& factor) {
  const int dim = psi_in.dimension();
  const PositionGrid grid = PositionGrid::for_dimension(dim);
  Vector values = wavefunction_on_grid(psi_in, grid);
  for (Eigen::Index j = 0; j < grid.size(); ++j) values[j] *= factor(grid.points[j]);
  return project_to_fock(values, grid, dim);
}

}  // namespace

double InjectionParams::squeeze_ratio() const {
  if (gamma_tilde == 0.0) throw ContractViolation("injection: gamma_tilde = 0 gives a degenerate squeeze ratio");
  const double r = std::cbrt(gamma / gamma_tilde);
  if (!std::isfinite(r) || r == 0.0) {
    throw ContractViolation("injection: squeeze ratio (gamma/gamma_tilde)^(1/3) must be finite and non-zero");
  }
  return r;
}

void InjectionParams::validate() const {
  (void)squeeze_ratio();
  if (squeeze_ratio() < 0.0) throw ContractViolation("injection: gamma and gamma_tilde must share a sign");
  if (!(s > 0.0)) throw ContractViolation("injection: s must be positive");
  if (dimension < 2) throw InvalidDimension("injection: dimension must be >= 2");
}

InjectionCircuit::InjectionCircuit(const InjectionParams& params)
    : params_(params), grid_(PositionGrid::for_dimension(params.dimension, kBranchGridPoints)) {
  params_.validate();
  r_ = params_.squeeze_ratio();
  const int dim = params_.dimension;
  squeeze_ = squeezer(dim, r_).entries();
  const Quadratures q = build_quadratures(dim);
  Eigen::SelfAdjointEigenSolver<Matrix> xs(q.x.entries());
  x_vectors_ = xs.eigenvectors();
  x_values_ = xs.eigenvalues();
  Eigen::SelfAdjointEigenSolver<Matrix> ps(q.p.entries());
  p_vectors_ = ps.eigenvectors();
  p_values_ = ps.eigenvalues();
}

FockState InjectionCircuit::entangle(const FockState& psi_in, const FockState& resource) const {
  const int dim = params_.dimension;
  if (psi_in.dimension() != dim || resource.dimension() != dim) {
    throw DimensionMismatch("injection: input and resource must both have dimension " + std::to_string(dim));
  }
  const Vector v = squeeze_ * psi_in.amplitudes();
  // Row-major amplitude matrix psi(i, j) = v_i r_j; (A (x) B) psi = A psi B^T.
  Matrix psi = v * resource.amplitudes().transpose();
  Matrix rotated = x_vectors_.adjoint() * psi * p_vectors_.conjugate();
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) rotated(j, k) *= std::exp(Complex(0.0, x_values_[j] * p_values_[k]));
  }
  const Matrix out = x_vectors_ * rotated * p_vectors_.transpose();
  RowMatrix row = out;
  return FockState(Eigen::Map<const Vector>(row.data(), row.size()), {dim, dim});
}

FockState InjectionCircuit::correct(const FockState& conditional, double x_meas) const {
  const double g = params_.gamma_tilde;
  Vector phases(x_values_.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    const double x = x_values_[j];
    phases[j] = std::exp(Complex(0.0, -g * x_meas * x_meas * x_meas - 3.0 * g * x_meas * x * (x + x_meas)));
  }
  const Vector corrected = x_vectors_ * (phases.asDiagonal() * (x_vectors_.adjoint() * conditional.amplitudes()));
  return FockState(squeeze_.adjoint() * corrected);
}

DensityMatrix InjectionCircuit::ancilla_marginal(const FockState& psi_in, const DensityMatrix& resource) const {
  const int dim = params_.dimension;
  Matrix marginal = Matrix::Zero(dim, dim);
  for (const auto& c : pure_components(resource)) {
    const FockState joint = entangle(psi_in, c.state);
    const Eigen::Map<const RowMatrix> psi(joint.amplitudes().data(), dim, dim);
    // rho_anc(j, j') = sum_i psi(i, j) conj(psi(i, j'))
    marginal += c.weight * (psi.transpose() * psi.conjugate());
  }
  return DensityMatrix(std::move(marginal));
}

InjectionResult InjectionCircuit::run(const FockState& psi_in, const DensityMatrix& resource,
                                      std::optional<double> x_meas, Rng* rng) const {
  const int dim = params_.dimension;
  if (resource.dimension() != dim || resource.mode_count() != 1) {
    throw DimensionMismatch("injection: resource must be single-mode with dimension " + std::to_string(dim));
  }
  check_tail(psi_in.tail_mass(), params_.tail_tolerance, dim, "input state");
  check_tail(std::abs(resource.entries()(dim - 1, dim - 1)), params_.tail_tolerance, dim, "resource state");

  const std::vector<Component> components = pure_components(resource);
  if (!x_meas) {
    if (rng == nullptr) throw ContractViolation("injection: sampling a branch requires an RNG");
    const QuadratureSampler sampler(ancilla_marginal(psi_in, resource), 0.0, grid_);
    x_meas = sampler.sample(*rng);
  }
  const double x = *x_meas;
  const Vector bra = hermite_functions(dim, x).cast<Complex>();

  Matrix out = Matrix::Zero(dim, dim);
  double weight = 0.0;
  std::optional<FockState> single;
  for (const auto& c : components) {
    const Projection proj = project_ancilla(entangle(psi_in, c.state), bra, 1);
    const FockState corrected = correct(proj.state, x);
    out += c.weight * corrected.amplitudes() * corrected.amplitudes().adjoint();
    weight += c.weight * proj.weight;
    if (components.size() == 1) single = corrected;
  }
  if (!(weight > 0.0)) throw ContractViolation("injection: branch has zero probability density");

  InjectionResult result{DensityMatrix(out / out.trace().real()), std::nullopt, x, weight, 0.0,
                         weight < kImprobableBranchDensity};
  if (single) result.output_state = single->normalized();
  result.fidelity_to_target = fidelity(target(psi_in, x), result.output);
  return result;
}

InjectionResult InjectionCircuit::run(const FockState& psi_in, const FockState& resource,
                                      std::optional<double> x_meas, Rng* rng) const {
  return run(psi_in, DensityMatrix::pure(resource), x_meas, rng);
}

FockState InjectionCircuit::target(const FockState& psi_in, double x_meas) const {
  return analytic_target(psi_in, params_.gamma, params_.s, r_, x_meas);
}

InjectionResult inject_cubic(const FockState& psi_in, const DensityMatrix& resource, const InjectionParams& params,
                             std::optional<double> x_meas, Rng* rng) {
  return InjectionCircuit(params).run(psi_in, resource, x_meas, rng);
}

InjectionResult inject_cubic(const FockState& psi_in, const FockState& resource, const InjectionParams& params,
                             std::optional<double> x_meas, Rng* rng) {
  return InjectionCircuit(params).run(psi_in, resource, x_meas, rng);
}

FockOperator entangler_matrix(int dimension) {
  const Quadratures q = build_quadratures(dimension);
  return hermitian_exponential(tensor(q.x, q.p), 1.0);
}

FockState analytic_target(const FockState& psi_in, double gamma, double s, double r, double x_meas) {
  if (psi_in.mode_count() != 1) throw DimensionMismatch("analytic_target expects a single-mode input");
  if (!(s > 0.0) || !(r != 0.0)) throw ContractViolation("analytic_target: s and r must be non-zero");
  const double shift = x_meas / r;
  const double width = r * r / (2.0 * s * s);
  Vector c = on_grid_then_back(psi_in, [=](double x) {
    const double d = x + shift;
    return std::exp(Complex(-d * d * width, gamma * x * x * x));
  });
  const double norm = c.norm();
  if (!(norm >= 1e-12)) throw ContractViolation("analytic_target: envelope annihilates the input state");
  return FockState(c / norm);
}

FockState cubic_gate_image(const FockState& psi_in, double gamma) {
  if (psi_in.mode_count() != 1) throw DimensionMismatch("cubic_gate_image expects a single-mode input");
  Vector c = on_grid_then_back(psi_in, [=](double x) { return std::exp(Complex(0.0, gamma * x * x * x)); });
  return FockState(c / c.norm());
}

ChannelReport channel_fidelity_check(const FockState& sigma_resource, const DensityMatrix& rho_resource,
                                     const FockState& psi_in, const InjectionParams& params, int trials, Rng& rng,
                                     int workers) {
  if (trials < 1) throw ContractViolation("channel_fidelity_check: trials must be positive");
  const InjectionCircuit circuit(params);
  // sigma_perp is (rho - F sigma)/(1 - F): when F is near 1 it magnifies the
  // truncation tails of both states, so it is not held to the resource gate.
  InjectionParams perp_params = params;
  perp_params.tail_tolerance = 1.0;
  const InjectionCircuit perp_circuit(perp_params);
  const FockState sigma = sigma_resource.normalized();
  const DensityMatrix sigma_dm = DensityMatrix::pure(sigma);

  ChannelReport report;
  report.fidelity_in = fidelity(sigma, rho_resource);
  std::optional<DensityMatrix> perp;
  if (report.fidelity_in < 1.0 - 1e-12) {
    ComplementDecomposition dec = orthogonal_complement(rho_resource, sigma_dm);
    report.decomposition_residual = dec.residual;
    perp = std::move(dec.sigma_perp);
  }

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (auto& s : seeds) s = rng();
  report.branches.resize(seeds.size());

  parallel_for(seeds.size(), workers, [&](std::size_t t) {
    Rng local(seeds[t]);
    const InjectionResult ideal = circuit.run(psi_in, sigma, std::nullopt, &local);
    const InjectionResult real = circuit.run(psi_in, rho_resource, ideal.x_meas, nullptr);
    ChannelBranch& b = report.branches[t];
    b.x_meas = ideal.x_meas;
    b.fidelity_in = report.fidelity_in;
    b.fidelity_out = fidelity(*ideal.output_state, real.output);
    b.branch_weight_sigma = ideal.branch_weight;
    b.branch_weight_rho = real.branch_weight;
    if (perp) {
      const InjectionResult p = perp_circuit.run(psi_in, *perp, ideal.x_meas, nullptr);
      b.perp_overlap = fidelity(*ideal.output_state, p.output);
    }
  });

  report.min_margin = report.branches.front().fidelity_out - report.fidelity_in;
  report.min_perp_overlap = report.branches.front().perp_overlap;
  for (const auto& b : report.branches) {
    report.min_margin = std::min(report.min_margin, b.fidelity_out - b.fidelity_in);
    report.min_perp_overlap = std::min(report.min_perp_overlap, b.perp_overlap);
  }
  return report;
}

}  // namespace cvv
