#pragma once

// Fringe laws, visibilities, CHSH, no-signaling audit and coherence witnesses.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rtm/measurement.hpp"
#include "rtm/optics.hpp"

namespace rtm::analysis {

using measurement::CoincidenceTally;
using measurement::JointProbabilities;
using optics::PhaseSettings;

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;
inline constexpr double kChshTol = 1e-9;

enum class Pairing { same, opposite };

/// Closed-form coincidence probability of one cell for the measurement state
/// under the symmetric beam splitter: same-index cells (1,1), (2,2) give
/// (1 - cos dphi)/4, opposite-index cells give (1 + cos dphi)/4.
double coincidence_law(double delta_phi, Pairing pairing);

/// Born probabilities of `source` after circuit(settings).
JointProbabilities circuit_probabilities(const linalg::DensityOperator& source,
                                         const PhaseSettings& settings,
                                         optics::CircuitFn circuit = optics::circuit_unitary);

enum class SweepAxis { phi_s, phi_a, delta };

/// `points` settings evenly spaced over [0, 2pi) along `axis`, offset from
/// `base`. For `delta` the S phase moves and the A phase stays at base.phi_a.
std::vector<PhaseSettings> sweep_settings(const PhaseSettings& base, SweepAxis axis,
                                          std::size_t points);

/// n x n grid over [0, 2pi)^2, phi_s major.
std::vector<PhaseSettings> phase_grid(std::size_t n);

struct FringeScan {
  SweepAxis axis = SweepAxis::delta;
  std::vector<PhaseSettings> settings;
  std::vector<JointProbabilities> analytic;
  std::vector<CoincidenceTally> empirical;  // empty when no sampling was done

  double swept_phase(std::size_t k) const;
  /// Throws unless settings are non-empty and series lengths agree.
  void validate() const;
};

FringeScan analytic_scan(const linalg::DensityOperator& source,
                         std::vector<PhaseSettings> settings, SweepAxis axis,
                         optics::CircuitFn circuit = optics::circuit_unitary);

/// Detector-level quantities a fringe can be read from.
enum class Quantity { p11, p12, p21, p22, marg_s1, marg_s2, marg_a1, marg_a2 };

double quantity(const JointProbabilities& p, Quantity q);
std::uint64_t quantity_count(const CoincidenceTally& t, Quantity q);
Quantity cell_quantity(int ds, int da);
std::string to_string(Quantity q);

/// (max - min)/(max + min). Throws on an empty or all-zero series.
double visibility(std::span<const double> series);

/// Throws unless the scan has >= 8 points whose swept phases leave no
/// circular gap wider than pi/4.
void require_full_period(const FringeScan& scan);

/// Analytic visibility of a quantity over the scan.
double visibility(const FringeScan& scan, Quantity q);
double visibility(const FringeScan& scan, int ds, int da);

struct EmpiricalVisibility {
  double value = 0.0;
  double sigma = 0.0;
};

/// Visibility of the least-squares fringe c + A cos(theta) + B sin(theta)
/// fitted to the empirical frequencies, i.e. sqrt(A^2 + B^2)/c, with sigma
/// from linear propagation of the binomial standard errors.
EmpiricalVisibility empirical_visibility(std::span<const double> phases,
                                         std::span<const std::uint64_t> successes,
                                         std::span<const std::uint64_t> trials);
EmpiricalVisibility empirical_visibility(const FringeScan& scan, Quantity q);

/// E = p11 + p22 - p12 - p21.
double correlation(const JointProbabilities& p);

struct ChshResult {
  std::array<PhaseSettings, 4> settings{};
  std::array<double, 4> correlations{};
  double s_value = 0.0;

  bool violates() const { return std::abs(s_value) > 2.0 + kChshTol; }
};

/// S = E(s, a) - E(s, a') + E(s', a) + E(s', a').
ChshResult chsh(double phi_s, double phi_s_prime, double phi_a, double phi_a_prime,
                const linalg::DensityOperator& source);
ChshResult chsh(double phi_s, double phi_s_prime, double phi_a, double phi_a_prime);

/// Canonical settings (0, pi/2; pi/4, 3pi/4).
ChshResult chsh_canonical(const linalg::DensityOperator& source);

struct ChshMaximum {
  double coarse_max = 0.0;   // max |S| on the coarse grid
  double refined_max = 0.0;  // after local pattern-search refinement
  ChshResult best;
};

/// Exhaustive |S| scan on a coarse^4 grid of the four angles, then a local
/// pattern search from the best coarse point.
ChshMaximum chsh_maximize(const linalg::DensityOperator& source, std::size_t coarse = 64);

using JointFn = std::function<JointProbabilities(const PhaseSettings&)>;

/// max over pairs of grid points sharing phi_a of the change in A's marginal,
/// and over pairs sharing phi_s of the change in S's marginal.
double no_signaling_audit(const std::vector<PhaseSettings>& grid, const JointFn& joint);

/// Q = |1><2| + |2><1|, P = i|1><2| - i|2><1|.
linalg::Operator witness_q();
linalg::Operator witness_p();

struct LocalCoherence {
  double q = 0.0;
  double p = 0.0;
};

/// (<Q>, <P>) on a two-dimensional state; equals (2 Re rho12, 2 Im rho12).
LocalCoherence local_coherence(const linalg::DensityOperator& rho);

struct DiscriminationReport {
  struct Row {
    PhaseSettings settings;
    measurement::Marginals entangled;
    measurement::Marginals mixture;
  };
  std::vector<Row> rows;
  double max_marginal_difference = 0.0;
  double visibility_entangled = 0.0;
  double visibility_mixture = 0.0;
  double chsh_max_entangled = 0.0;
  double chsh_max_mixture = 0.0;
};

/// Measurement state vs. its collapsed mixture over a grid covering a full
/// period of phi_s - phi_a.
DiscriminationReport state_discrimination_report(const std::vector<PhaseSettings>& grid);

}  // namespace rtm::analysis
