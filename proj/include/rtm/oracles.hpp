#pragma once

// Independent reference computations and random test-object generators
// used by the self-check suite and the test binaries.

#include <cstdint>

#include "rtm/linalg.hpp"
#include "rtm/rng.hpp"

namespace rtm::oracle {

/// Reduced state by sandwiching with basis projections:
/// sum_k (I ⊗ <k|) rho (I ⊗ |k>) for keep = 0, and the mirror for keep = 1.
/// Two-factor states only.
linalg::Matrix partial_trace_by_projection(const linalg::Matrix& rho, std::size_t dim_s,
                                           std::size_t dim_a, std::size_t keep);

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return rng_.uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  double gaussian();
  linalg::Complex complex_gaussian();

  linalg::StateVector state(const linalg::Dims& dims);
  linalg::DensityOperator density(const linalg::Dims& dims);
  /// Haar-ish unitary from the QR of a complex Gaussian matrix.
  linalg::Operator unitary(std::size_t dim);
  linalg::Operator hermitian(std::size_t dim);
  /// Normalized complex pair (a, b).
  std::pair<linalg::Complex, linalg::Complex> amplitude_pair();

 private:
  Xoshiro256 rng_;
};

}  // namespace rtm::oracle
