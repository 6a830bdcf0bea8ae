#include "rtm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtm::linalg {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw LinalgError(msg);
}

bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_dims(const Dims& dims, std::size_t dim) {
  require(!dims.empty(), "factor_dims must be non-empty");
  for (auto d : dims) require(d > 0, "factor dimensions must be positive");
  require(product(dims) == dim, "product of factor_dims does not match dimension");
  require(dim <= kMaxDim, "dimension " + std::to_string(dim) + " exceeds maximum of " +
                              std::to_string(kMaxDim));
}

Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_fits(std::size_t da, std::size_t db) {
  require(da * db <= kMaxDim, "tensor product dimension " + std::to_string(da * db) +
                                  " exceeds maximum of " + std::to_string(kMaxDim));
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) <= tol;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  require(m.rows() == m.cols(), "eigenvalues need a square matrix");
  // Symmetrize so roundoff-level anti-Hermitian parts do not leak in.
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, "eigenvalue solver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// StateVector

StateVector::StateVector(std::vector<Complex> amps, Dims factor_dims)
    : amps_(std::move(amps)), factor_dims_(std::move(factor_dims)) {
  require(!amps_.empty(), "state vector must be non-empty");
  check_dims(factor_dims_, amps_.size());
  for (const auto& a : amps_) require(finite(a), "state amplitude is not finite");
  require(std::abs(norm() - 1.0) <= kStructuralTol, "state vector is not normalized");
}

StateVector::StateVector(std::vector<Complex> amps)
    : StateVector(amps, Dims{amps.size()}) {}

StateVector StateVector::basis(std::size_t index, Dims factor_dims) {
  const auto dim = product(factor_dims);
  require(index < dim, "basis index out of range");
  std::vector<Complex> amps(dim, 0.0);
  amps[index] = 1.0;
  return {std::move(amps), std::move(factor_dims)};
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

// Operator

Operator::Operator(Matrix mat, OperatorKind kind, Dims factor_dims)
    : mat_(std::move(mat)), kind_(kind), factor_dims_(std::move(factor_dims)) {
  require(mat_.rows() == mat_.cols() && mat_.rows() > 0, "operator must be square and non-empty");
  check_dims(factor_dims_, dim());
  require(mat_.allFinite(), "operator entries must be finite");
  if (kind_ == OperatorKind::unitary) require(is_unitary(mat_), "operator is not unitary");
  if (kind_ == OperatorKind::hermitian) require(is_hermitian(mat_), "operator is not Hermitian");
}

Operator::Operator(Matrix mat, OperatorKind kind)
    : Operator(mat, kind, Dims{static_cast<std::size_t>(mat.rows())}) {}

Operator Operator::identity(std::size_t dim) {
  return {Matrix::Identity(dim, dim), OperatorKind::unitary};
}

// DensityOperator

DensityOperator::DensityOperator(Matrix mat, Dims factor_dims)
    : mat_(std::move(mat)), factor_dims_(std::move(factor_dims)) {
  require(mat_.rows() == mat_.cols() && mat_.rows() > 0,
          "density operator must be square and non-empty");
  check_dims(factor_dims_, dim());
  require(mat_.allFinite(), "density operator entries must be finite");
  require(is_hermitian(mat_), "density operator is not Hermitian");
  require(std::abs(mat_.trace() - Complex(1.0)) <= kStructuralTol,
          "density operator trace is not 1");
  const auto ev = hermitian_eigenvalues(mat_);
  require(ev.front() >= -kPositivityTol, "density operator is not positive semidefinite");
}

DensityOperator::DensityOperator(Matrix mat)
    : DensityOperator(mat, Dims{static_cast<std::size_t>(mat.rows())}) {}

std::vector<double> DensityOperator::eigenvalues() const { return hermitian_eigenvalues(mat_); }

// Products

StateVector tensor(const StateVector& a, const StateVector& b) {
  require_fits(a.dim(), b.dim());
  std::vector<Complex> amps;
  amps.reserve(a.dim() * b.dim());
  for (const auto& x : a.amps())
    for (const auto& y : b.amps()) amps.push_back(x * y);
  return {std::move(amps), concat(a.factor_dims(), b.factor_dims())};
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Mixed kinds (e.g. an observable tensored with the identity) are resolved
// from the product matrix, preferring hermitian so observables stay usable.
OperatorKind combined_kind(OperatorKind a, OperatorKind b, const Matrix& m) {
  if (a == b) return a;
  if (is_hermitian(m)) return OperatorKind::hermitian;
  if (is_unitary(m)) return OperatorKind::unitary;
  return OperatorKind::general;
}

}  // namespace

Operator tensor(const Operator& a, const Operator& b) {
  require_fits(a.dim(), b.dim());
  Matrix m = kron(a.mat(), b.mat());
  const auto kind = combined_kind(a.kind(), b.kind(), m);
  return {std::move(m), kind, concat(a.factor_dims(), b.factor_dims())};
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  require_fits(a.dim(), b.dim());
  return {kron(a.mat(), b.mat()), concat(a.factor_dims(), b.factor_dims())};
}

StateVector apply(const Operator& u, const StateVector& psi) {
  require(u.kind() == OperatorKind::unitary, "apply requires a unitary operator");
  require(u.dim() == psi.dim(), "operator and state dimensions differ");
  const Eigen::Map<const Eigen::VectorXcd> in(psi.amps().data(),
                                              static_cast<Eigen::Index>(psi.dim()));
  const Eigen::VectorXcd out = u.mat() * in;
  return {std::vector<Complex>(out.data(), out.data() + out.size()), psi.factor_dims()};
}

DensityOperator evolve(const Operator& u, const DensityOperator& rho) {
  require(u.kind() == OperatorKind::unitary, "evolve requires a unitary operator");
  require(u.dim() == rho.dim(), "operator and density operator dimensions differ");
  Matrix out = u.mat() * rho.mat() * u.mat().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return {std::move(out), rho.factor_dims()};
}

DensityOperator outer(const StateVector& psi) {
  const auto n = static_cast<Eigen::Index>(psi.dim());
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) m(j, k) = psi[j] * std::conj(psi[k]);
  return {std::move(m), psi.factor_dims()};
}

DensityOperator partial_trace(const DensityOperator& rho, std::size_t keep) {
  const auto& dims = rho.factor_dims();
  require(dims.size() >= 2, "partial trace needs at least two factors");
  require(keep < dims.size(), "invalid factor index " + std::to_string(keep));

  // Composite index = outer * (d_keep * inner) + i_keep * inner + i_inner.
  std::size_t inner = 1;
  for (std::size_t f = keep + 1; f < dims.size(); ++f) inner *= dims[f];
  const std::size_t dk = dims[keep];
  const std::size_t outer_count = rho.dim() / (dk * inner);

  Matrix red = Matrix::Zero(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::size_t o = 0; o < outer_count; ++o)
        for (std::size_t n = 0; n < inner; ++n) {
          const std::size_t r = (o * dk + i) * inner + n;
          const std::size_t c = (o * dk + j) * inner + n;
          acc += rho(r, c);
        }
      red(i, j) = acc;
    }
  const Complex tr = red.trace();
  require(std::abs(tr) > 0.0, "reduced state has zero trace");
  red /= tr.real();
  return {std::move(red), Dims{dk}};
}

double expectation(const DensityOperator& rho, const Operator& q) {
  require(q.kind() == OperatorKind::hermitian, "expectation requires a Hermitian observable");
  require(q.dim() == rho.dim(), "observable and state dimensions differ");
  const Complex t = (rho.mat() * q.mat()).trace();
  require(std::abs(t.imag()) < kPositivityTol, "expectation has a non-negligible imaginary part");
  return t.real();
}

double expectation(const StateVector& psi, const Operator& q) {
  require(q.kind() == OperatorKind::hermitian, "expectation requires a Hermitian observable");
  require(q.dim() == psi.dim(), "observable and state dimensions differ");
  const Eigen::Map<const Eigen::VectorXcd> v(psi.amps().data(),
                                             static_cast<Eigen::Index>(psi.dim()));
  const Complex t = v.dot(q.mat() * v);  // dot conjugates the left operand
  require(std::abs(t.imag()) < kPositivityTol, "expectation has a non-negligible imaginary part");
  return t.real();
}

Operator lift(const Operator& local, const Dims& dims, std::size_t factor) {
  require(factor < dims.size(), "invalid factor index " + std::to_string(factor));
  require(local.dim() == dims[factor], "local operator dimension does not match factor");
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t f = 0; f < dims.size(); ++f)
    m = kron(m, f == factor ? local.mat() : Matrix::Identity(dims[f], dims[f]));
  require(m.rows() <= static_cast<Eigen::Index>(kMaxDim), "lifted dimension exceeds maximum");
  return {std::move(m), local.kind(), dims};
}

DensityOperator mix(const DensityOperator& a, const DensityOperator& b, double weight) {
  require(weight >= 0.0 && weight <= 1.0, "mixture weight must lie in [0, 1]");
  require(a.factor_dims() == b.factor_dims(), "mixed states must share factor_dims");
  return {weight * a.mat() + (1.0 - weight) * b.mat(), a.factor_dims()};
}

}  // namespace rtm::linalg
