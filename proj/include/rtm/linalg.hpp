#pragma once

// Dense complex linear algebra on small composite Hilbert spaces.
//
// Basis ordering is subsystem-major everywhere: for factors (S, A) the
// composite index is i_S * dim_A + i_A, so a two-qubit space is ordered
// |s1 a1>, |s1 a2>, |s2 a1>, |s2 a2>.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rtm::linalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Dims = std::vector<std::size_t>;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr std::size_t kMaxDim = 16;

class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t product(const Dims& dims);

class StateVector {
 public:
  /// Validates finiteness, unit norm and product(factor_dims) == amps.size().
  StateVector(std::vector<Complex> amps, Dims factor_dims);

  /// Single-factor state; factor_dims = {amps.size()}.
  explicit StateVector(std::vector<Complex> amps);

  static StateVector basis(std::size_t index, Dims factor_dims);

  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amps() const { return amps_; }
  const Complex& operator[](std::size_t k) const { return amps_[k]; }
  const Dims& factor_dims() const { return factor_dims_; }
  double norm() const;

 private:
  std::vector<Complex> amps_;
  Dims factor_dims_;
};

enum class OperatorKind { unitary, hermitian, general };

class Operator {
 public:
  /// Validates squareness, finiteness and the property implied by `kind`.
  Operator(Matrix mat, OperatorKind kind, Dims factor_dims);
  Operator(Matrix mat, OperatorKind kind);

  static Operator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }
  OperatorKind kind() const { return kind_; }
  const Dims& factor_dims() const { return factor_dims_; }

 private:
  Matrix mat_;
  OperatorKind kind_;
  Dims factor_dims_;
};

class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and positivity (eigenvalues >= -1e-10).
  DensityOperator(Matrix mat, Dims factor_dims);
  explicit DensityOperator(Matrix mat);

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }
  const Dims& factor_dims() const { return factor_dims_; }
  Complex operator()(std::size_t r, std::size_t c) const { return mat_(r, c); }

  /// Ascending eigenvalues.
  std::vector<double> eigenvalues() const;

 private:
  Matrix mat_;
  Dims factor_dims_;
};

bool is_unitary(const Matrix& m, double tol = kStructuralTol);
bool is_hermitian(const Matrix& m, double tol = kStructuralTol);
std::vector<double> hermitian_eigenvalues(const Matrix& m);

// Kronecker products, left operand major.
StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// u * psi. Requires u.kind() == unitary.
StateVector apply(const Operator& u, const StateVector& psi);

/// u rho u^dagger. Requires u.kind() == unitary.
DensityOperator evolve(const Operator& u, const DensityOperator& rho);

DensityOperator outer(const StateVector& psi);

/// Reduced state on factor `keep`, tracing out every other factor.
DensityOperator partial_trace(const DensityOperator& rho, std::size_t keep);

/// Tr(rho q). q must be Hermitian and act on the full space of rho.
double expectation(const DensityOperator& rho, const Operator& q);

/// <psi|q|psi>
double expectation(const StateVector& psi, const Operator& q);

/// Embeds a single-factor operator into the composite space of `dims`.
Operator lift(const Operator& local, const Dims& dims, std::size_t factor);

/// Convex combination weight*a + (1-weight)*b.
DensityOperator mix(const DensityOperator& a, const DensityOperator& b, double weight);

}  // namespace rtm::linalg
