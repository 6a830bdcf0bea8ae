#include "rtm/optics.hpp"

#include <cmath>
#include <numbers>

namespace rtm::optics {

using linalg::Dims;
using linalg::LinalgError;
using linalg::Matrix;
using linalg::OperatorKind;

void SourceKind::validate() const {
  const bool finite = std::isfinite(amp1.real()) && std::isfinite(amp1.imag()) &&
                      std::isfinite(amp2.real()) && std::isfinite(amp2.imag());
  if (!finite) throw LinalgError("source amplitudes must be finite");
  if (std::abs(std::norm(amp1) + std::norm(amp2) - 1.0) > linalg::kStructuralTol)
    throw LinalgError("source amplitudes are not normalized");
}

SourceKind measurement_state_source() { return {}; }

SourceKind product_source() {
  SourceKind k;
  k.tag = SourceTag::product;
  return k;
}

SourceKind mixture_source() {
  SourceKind k;
  k.tag = SourceTag::mixture;
  return k;
}

Operator beam_splitter() {
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex i{0.0, 1.0};
  Matrix m(2, 2);
  m << r, i * r, i * r, r;
  return {std::move(m), OperatorKind::unitary};
}

Operator phase_shifter(double phi) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return {std::move(m), OperatorKind::unitary};
}

Operator phase_shifter_path1(double phi) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = std::polar(1.0, phi);
  return {std::move(m), OperatorKind::unitary};
}

SourceState make_source(const SourceKind& kind) {
  kind.validate();
  const Dims dims{2, 2};
  switch (kind.tag) {
    case SourceTag::entangled:
      return StateVector({kind.amp1, 0.0, 0.0, kind.amp2}, dims);
    case SourceTag::product: {
      const double r = 1.0 / std::numbers::sqrt2;
      const StateVector plus({r, r});
      return linalg::tensor(plus, plus);
    }
    case SourceTag::mixture: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = std::norm(kind.amp1);
      m(3, 3) = std::norm(kind.amp2);
      return DensityOperator(std::move(m), dims);
    }
  }
  throw LinalgError("unknown source tag");
}

DensityOperator source_density(const SourceKind& kind) {
  auto state = make_source(kind);
  if (auto* psi = std::get_if<StateVector>(&state)) return linalg::outer(*psi);
  return std::get<DensityOperator>(state);
}

StateVector single_photon_output(double phi, bool side_a) {
  const double r = 1.0 / std::numbers::sqrt2;
  const StateVector plus({r, r});
  const Operator shift = side_a ? phase_shifter_path1(phi) : phase_shifter(phi);
  return linalg::apply(beam_splitter(), linalg::apply(shift, plus));
}

Operator circuit_unitary(const PhaseSettings& settings) {
  const Operator bs = beam_splitter();
  const Operator shifts =
      linalg::tensor(phase_shifter(settings.phi_s), phase_shifter_path1(settings.phi_a));
  Matrix m = linalg::tensor(bs, bs).mat() * shifts.mat();
  return {std::move(m), OperatorKind::unitary, Dims{2, 2}};
}

Matrix perturbed_beam_splitter_matrix(double epsilon) {
  Matrix m = beam_splitter().mat();
  m(0, 0) += epsilon;
  return m;
}

}  // namespace rtm::optics
