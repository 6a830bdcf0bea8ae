#include "rtm/oracles.hpp"

#include <cmath>
#include <numbers>

namespace rtm::oracle {

using linalg::Complex;
using linalg::Matrix;

Matrix partial_trace_by_projection(const Matrix& rho, std::size_t dim_s, std::size_t dim_a,
                                   std::size_t keep) {
  const auto ds = static_cast<Eigen::Index>(dim_s);
  const auto da = static_cast<Eigen::Index>(dim_a);
  const Eigen::Index traced = keep == 0 ? da : ds;
  Matrix acc = Matrix::Zero(keep == 0 ? ds : da, keep == 0 ? ds : da);
  for (Eigen::Index k = 0; k < traced; ++k) {
    Matrix ket = Matrix::Zero(traced, 1);
    ket(k, 0) = 1.0;
    Matrix proj;  // composite -> kept factor map, (I ⊗ <k|) or (<k| ⊗ I)
    if (keep == 0) {
      proj = Matrix::Zero(ds, ds * da);
      for (Eigen::Index i = 0; i < ds; ++i) proj.block(i, i * da, 1, da) = ket.transpose();
    } else {
      proj = Matrix::Zero(da, ds * da);
      for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index s = 0; s < ds; ++s) proj(i, s * da + i) = ket(s, 0);
    }
    acc += proj * rho * proj.adjoint();
  }
  return acc;
}

double RandomSource::gaussian() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng_.uniform();
  const double u2 = rng_.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex RandomSource::complex_gaussian() { return {gaussian(), gaussian()}; }

linalg::StateVector RandomSource::state(const linalg::Dims& dims) {
  const auto dim = linalg::product(dims);
  std::vector<Complex> amps(dim);
  double norm2 = 0.0;
  for (auto& a : amps) {
    a = complex_gaussian();
    norm2 += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : amps) a *= inv;
  return {std::move(amps), dims};
}

linalg::DensityOperator RandomSource::density(const linalg::Dims& dims) {
  const auto dim = static_cast<Eigen::Index>(linalg::product(dims));
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = complex_gaussian();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {std::move(rho), dims};
}

linalg::Operator RandomSource::unitary(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return {std::move(q), linalg::OperatorKind::unitary};
}

linalg::Operator RandomSource::hermitian(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = complex_gaussian();
  Matrix h = 0.5 * (g + g.adjoint());
  return {std::move(h), linalg::OperatorKind::hermitian};
}

std::pair<Complex, Complex> RandomSource::amplitude_pair() {
  const Complex a = complex_gaussian();
  const Complex b = complex_gaussian();
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

}  // namespace rtm::oracle
