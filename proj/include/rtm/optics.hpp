#pragma once

// Optical elements and sources of the two-photon apparatus.
//
// Each photon has a two-dimensional path space {|1>, |2>}. The source feeds
// photon S and photon A into phase shifters followed by a 50/50 beam splitter
// per photon; detector k of a photon monitors beam-splitter output port k.

#include <numbers>
#include <variant>

#include "rtm/linalg.hpp"

namespace rtm::optics {

using linalg::Complex;
using linalg::DensityOperator;
using linalg::Operator;
using linalg::StateVector;

/// Phase settings in radians, stored unwrapped.
struct PhaseSettings {
  double phi_s = 0.0;
  double phi_a = 0.0;

  double delta() const { return phi_s - phi_a; }
  friend bool operator==(const PhaseSettings&, const PhaseSettings&) = default;
};

enum class SourceTag { entangled, product, mixture };

/// Source description. For `entangled` the state is amp1|s1 a1> + amp2|s2 a2>;
/// `mixture` uses the weights |amp1|^2, |amp2|^2 over the same two product states;
/// `product` ignores the amplitudes and emits equal superpositions on both sides.
struct SourceKind {
  SourceTag tag = SourceTag::entangled;
  Complex amp1{1.0 / std::numbers::sqrt2, 0.0};
  Complex amp2{1.0 / std::numbers::sqrt2, 0.0};

  /// Throws linalg::LinalgError when |amp1|^2 + |amp2|^2 != 1 or non-finite.
  void validate() const;
};

SourceKind measurement_state_source();
SourceKind product_source();
SourceKind mixture_source();

/// (1/sqrt2) [[1, i], [i, 1]]
Operator beam_splitter();

/// diag(1, e^{i phi}): the shift rides on path 2.
Operator phase_shifter(double phi);

/// diag(e^{i phi}, 1): the shift rides on path 1. Used for photon A so that the
/// two-photon fringe depends on phi_s - phi_a.
Operator phase_shifter_path1(double phi);

using SourceState = std::variant<StateVector, DensityOperator>;

SourceState make_source(const SourceKind& kind);

/// make_source() promoted to a density operator.
DensityOperator source_density(const SourceKind& kind);

/// Single photon after its own phase shifter and beam splitter, starting from
/// (|1> + |2>)/sqrt2. side_a selects photon A's shifter placement.
StateVector single_photon_output(double phi, bool side_a = false);

/// (BS ⊗ BS) · (phase_shifter(phi_s) ⊗ phase_shifter_path1(phi_a)).
Operator circuit_unitary(const PhaseSettings& settings);

/// Signature shared by all presets that run the interferometer.
using CircuitFn = Operator (*)(const PhaseSettings&);

/// Hidden fault hook for self-checks: returns a beam splitter with its
/// (0,0) element perturbed by `epsilon` (not unitary for epsilon != 0).
linalg::Matrix perturbed_beam_splitter_matrix(double epsilon);

}  // namespace rtm::optics
