#pragma once

// Scalar brute-force model of the interferometer for tests: plain loops over
// paths with hand-written element matrices, no use of the linalg module.

#include <array>
#include <complex>
#include <numbers>

namespace paths {

using C = std::complex<double>;
using Amp2x2 = std::array<std::array<C, 2>, 2>;      // c[i][j]: S path i, A path j
using Prob2x2 = std::array<std::array<double, 2>, 2>;  // p[ds][da], 0-based

inline C bs(int out, int in) {
  const double r = 1.0 / std::numbers::sqrt2;
  return out == in ? C(r, 0.0) : C(0.0, r);
}

/// S is shifted on its path 2, A on its path 1.
inline Prob2x2 pure(const Amp2x2& c, double phi_s, double phi_a) {
  const std::array<C, 2> shift_s{1.0, std::polar(1.0, phi_s)};
  const std::array<C, 2> shift_a{std::polar(1.0, phi_a), 1.0};
  Prob2x2 p{};
  for (int ds = 0; ds < 2; ++ds)
    for (int da = 0; da < 2; ++da) {
      C amp = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) amp += bs(ds, i) * bs(da, j) * shift_s[i] * shift_a[j] * c[i][j];
      p[ds][da] = std::norm(amp);
    }
  return p;
}

inline Amp2x2 measurement_state(C a = 1.0 / std::numbers::sqrt2, C b = 1.0 / std::numbers::sqrt2) {
  return {{{a, 0.0}, {0.0, b}}};
}

inline Amp2x2 product_state() { return {{{0.5, 0.5}, {0.5, 0.5}}}; }

/// Weighted mixture of |s1 a1> and |s2 a2>.
inline Prob2x2 mixture(double w1, double phi_s, double phi_a) {
  const auto p1 = pure({{{1.0, 0.0}, {0.0, 0.0}}}, phi_s, phi_a);
  const auto p2 = pure({{{0.0, 0.0}, {0.0, 1.0}}}, phi_s, phi_a);
  Prob2x2 p{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p[i][j] = w1 * p1[i][j] + (1.0 - w1) * p2[i][j];
  return p;
}

}  // namespace paths
