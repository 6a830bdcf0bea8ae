#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rtm/linalg.hpp"
#include "rtm/oracles.hpp"
#include "rtm/optics.hpp"

using namespace rtm::linalg;

namespace {

constexpr double kTol = 1e-12;
const double r2 = 1.0 / std::numbers::sqrt2;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Independent oracle: literal double-index summation over the traced factor,
// (Tr_A rho)_{ij} = sum_k rho_{(i,k),(j,k)} and (Tr_S rho)_{ij} = sum_k rho_{(k,i),(k,j)}.
Matrix brute_force_partial_trace(const Matrix& rho, int keep) {
  Matrix out = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out(i, j) += keep == 0 ? rho(2 * i + k, 2 * j + k) : rho(2 * k + i, 2 * k + j);
  return out;
}

StateVector bell_state() { return StateVector({r2, 0.0, 0.0, r2}, Dims{2, 2}); }

Operator pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return {m, OperatorKind::hermitian};
}

}  // namespace

TEST_CASE("state vector validation") {
  CHECK_NOTHROW(StateVector({1.0, 0.0}));
  CHECK_THROWS_AS(StateVector({1.0, 1.0}), LinalgError);
  CHECK_THROWS_AS(StateVector({std::nan(""), 0.0}), LinalgError);
  CHECK_THROWS_AS(StateVector({1.0, 0.0, 0.0}, Dims{2, 2}), LinalgError);
  CHECK_THROWS_AS(StateVector(std::vector<Complex>(32, 1.0 / std::sqrt(32.0))), LinalgError);
}

TEST_CASE("operator kinds are validated") {
  Matrix m(2, 2);
  m << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(Operator(m, OperatorKind::unitary), LinalgError);
  CHECK_THROWS_AS(Operator(m, OperatorKind::hermitian), LinalgError);
  CHECK_NOTHROW(Operator(m, OperatorKind::general));
}

TEST_CASE("density operator validation") {
  Matrix ok = Matrix::Identity(2, 2) / 2.0;
  CHECK_NOTHROW(DensityOperator{ok});
  Matrix not_unit = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator{not_unit}, LinalgError);
  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityOperator{negative}, LinalgError);
  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  CHECK_THROWS_AS(DensityOperator{nonherm}, LinalgError);
}

TEST_CASE("tensor examples") {
  const auto i4 = tensor(Operator::identity(2), Operator::identity(2));
  CHECK(max_abs(i4.mat() - Matrix::Identity(4, 4)) == 0.0);
  CHECK(i4.factor_dims() == Dims{2, 2});

  const StateVector plus({r2, r2});
  const auto uniform = tensor(plus, plus);
  for (const auto& a : uniform.amps()) CHECK(std::abs(a - Complex(0.5)) < kTol);

  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi);
  const auto flipped = apply(tensor(Operator(z, OperatorKind::unitary), Operator::identity(2)),
                             bell_state());
  CHECK(std::abs(flipped[0] - Complex(r2)) < kTol);
  CHECK(std::abs(flipped[3] - Complex(-r2)) < kTol);
  CHECK(std::abs(flipped[1]) < kTol);
  CHECK(std::abs(flipped[2]) < kTol);
}

TEST_CASE("tensor rejects dimension overflow") {
  const auto i4 = tensor(Operator::identity(2), Operator::identity(2));
  const auto i16 = tensor(i4, i4);
  CHECK(i16.dim() == 16);
  CHECK_THROWS_AS(tensor(i16, Operator::identity(2)), LinalgError);
}

TEST_CASE("apply examples") {
  const auto s1 = StateVector::basis(0, Dims{2});
  const auto out = apply(rtm::optics::beam_splitter(), s1);
  CHECK(std::abs(out[0] - Complex(r2)) < kTol);
  CHECK(std::abs(out[1] - Complex(0.0, r2)) < kTol);

  const auto same = apply(Operator::identity(2), StateVector({r2, Complex(0.0, r2)}));
  CHECK(std::abs(same[1] - Complex(0.0, r2)) < kTol);

  const double phi = 0.7;
  const auto shifted = apply(rtm::optics::phase_shifter(phi), StateVector::basis(1, Dims{2}));
  CHECK(std::abs(shifted[1] - std::polar(1.0, phi)) < kTol);

  CHECK_THROWS_AS(apply(Operator::identity(4), s1), LinalgError);
  CHECK_THROWS_AS(apply(pauli_x(), s1), LinalgError);  // hermitian kind, not unitary
}

TEST_CASE("outer examples") {
  CHECK(max_abs(outer(StateVector::basis(0, Dims{2})).mat() -
                (Matrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished()) == 0.0);

  const auto ms = outer(bell_state());
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const bool corner = (r == 0 || r == 3) && (c == 0 || c == 3);
      CHECK(std::abs(ms(r, c) - Complex(corner ? 0.5 : 0.0)) < kTol);
    }

  const auto half = outer(StateVector({r2, r2}));
  CHECK(max_abs(half.mat() - Matrix::Constant(2, 2, 0.5)) < kTol);
}

TEST_CASE("partial trace examples") {
  const auto ms = outer(bell_state());
  CHECK(max_abs(partial_trace(ms, 0).mat() - Matrix::Identity(2, 2) / 2.0) < kTol);
  CHECK(max_abs(partial_trace(ms, 1).mat() - Matrix::Identity(2, 2) / 2.0) < kTol);

  const StateVector plus({r2, r2});
  const auto reduced = partial_trace(outer(tensor(plus, plus)), 0);
  CHECK(max_abs(reduced.mat() - Matrix::Constant(2, 2, 0.5)) < kTol);

  Matrix mix = Matrix::Zero(4, 4);
  mix(0, 0) = mix(3, 3) = 0.5;
  const DensityOperator mixture(mix, Dims{2, 2});
  CHECK(max_abs(partial_trace(mixture, 1).mat() - Matrix::Identity(2, 2) / 2.0) < kTol);
}

TEST_CASE("partial trace errors") {
  CHECK_THROWS_AS(partial_trace(outer(StateVector({r2, r2})), 0), LinalgError);
  CHECK_THROWS_AS(partial_trace(outer(bell_state()), 2), LinalgError);
}

TEST_CASE("partial trace on three factors keeps the middle one") {
  const StateVector zero({1.0, 0.0});
  const StateVector plus({r2, r2});
  const auto rho = outer(tensor(tensor(zero, plus), zero));
  const auto mid = partial_trace(rho, 1);
  CHECK(max_abs(mid.mat() - Matrix::Constant(2, 2, 0.5)) < kTol);
}

TEST_CASE("partial trace matches brute-force summation on random states") {
  rtm::oracle::RandomSource rng(7);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const auto rho = rng.density(Dims{2, 2});
    for (int keep : {0, 1}) {
      const auto red = partial_trace(rho, static_cast<std::size_t>(keep));
      worst = std::max(worst, max_abs(red.mat() - brute_force_partial_trace(rho.mat(), keep)));
      CHECK(is_hermitian(red.mat()));
      CHECK(red.eigenvalues().front() >= -kPositivityTol);
    }
  }
  CHECK(worst <= kTol);
}

TEST_CASE("partial trace is linear in the state") {
  rtm::oracle::RandomSource rng(8);
  for (int n = 0; n < 50; ++n) {
    const auto a = rng.density(Dims{2, 2});
    const auto b = rng.density(Dims{2, 2});
    const double w = rng.uniform();
    const Matrix expected =
        w * partial_trace(a, 1).mat() + (1.0 - w) * partial_trace(b, 1).mat();
    CHECK(max_abs(partial_trace(mix(a, b, w), 1).mat() - expected) <= kTol);
  }
  CHECK_THROWS_AS(mix(rng.density(Dims{2, 2}), rng.density(Dims{2, 2}), 1.5), LinalgError);
}

TEST_CASE("expectation examples") {
  const auto qs = lift(pauli_x(), Dims{2, 2}, 0);
  CHECK(std::abs(expectation(outer(bell_state()), qs)) < kTol);

  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  CHECK(std::abs(expectation(DensityOperator(Matrix::Identity(2, 2) / 2.0),
                             Operator(z, OperatorKind::hermitian))) < kTol);

  CHECK(std::abs(expectation(outer(StateVector({r2, r2})), pauli_x()) - 1.0) < kTol);

  CHECK_THROWS_AS(expectation(outer(bell_state()), Operator::identity(4)), LinalgError);
  CHECK_THROWS_AS(expectation(outer(bell_state()), pauli_x()), LinalgError);
}

TEST_CASE("tensor of an observable with the identity stays an observable") {
  const auto qi = tensor(pauli_x(), Operator::identity(2));
  CHECK(qi.kind() == OperatorKind::hermitian);
}

TEST_CASE("random unitaries preserve the norm") {
  rtm::oracle::RandomSource rng(9);
  for (int n = 0; n < 200; ++n) {
    const auto dim = n % 2 == 0 ? 2u : 4u;
    const auto psi = rng.state(dim == 2 ? Dims{2} : Dims{2, 2});
    CHECK(std::abs(apply(rng.unitary(dim), psi).norm() - 1.0) <= kTol);
  }
}

TEST_CASE("expectation of a projector equals the bra-ket") {
  rtm::oracle::RandomSource rng(10);
  for (int n = 0; n < 200; ++n) {
    const auto psi = rng.state(Dims{2, 2});
    const auto q = rng.hermitian(4);
    CHECK(std::abs(expectation(outer(psi), q) - expectation(psi, q)) <= kTol);
  }
}

TEST_CASE("outer products are rank-one projectors") {
  rtm::oracle::RandomSource rng(11);
  for (int n = 0; n < 50; ++n) {
    const auto ev = outer(rng.state(Dims{2, 2})).eigenvalues();
    CHECK(std::abs(ev[3] - 1.0) <= kTol);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(ev[k]) <= kTol);
  }
}
