#pragma once

// Born-rule detector statistics, seeded sampling and coincidence tallies.
// Detector labels are 1 and 2; label k is beam-splitter output port k, i.e.
// basis index k-1 of the photon's path space.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rtm/linalg.hpp"

namespace rtm::measurement {

class MeasurementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// p(i, j) = Prob(S fires detector i, A fires detector j), i, j in {1, 2}.
class JointProbabilities {
 public:
  using Table = std::array<std::array<double, 2>, 2>;

  JointProbabilities() = default;
  /// Validates entries in [0, 1] and unit sum (1e-12).
  explicit JointProbabilities(const Table& table);

  /// Skips validation; used for deliberately corrupted tables in audits.
  static JointProbabilities unchecked(const Table& table);

  double operator()(int ds, int da) const { return table_[ds - 1][da - 1]; }
  const Table& table() const { return table_; }
  double sum() const;

 private:
  Table table_{};
};

struct Marginals {
  std::array<double, 2> s{};
  std::array<double, 2> a{};
};

struct DetectionEvent {
  std::uint64_t trial = 0;
  std::uint8_t d_s = 1;
  std::uint8_t d_a = 1;
  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

struct CoincidenceTally {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;

  std::uint64_t count(int ds, int da) const { return counts[ds - 1][da - 1]; }
  double frequency(int ds, int da) const;
  /// Binomial standard error sqrt(p̂(1-p̂)/n) of a cell frequency.
  double standard_error(int ds, int da) const;
  /// Empirical joint distribution.
  JointProbabilities estimate() const;
};

/// Requires a 4-dimensional state with factor_dims {2, 2}.
JointProbabilities born_probabilities(const linalg::StateVector& state);
JointProbabilities born_probabilities(const linalg::DensityOperator& state);

Marginals marginals(const JointProbabilities& p);

/// Inverse-CDF draw over the canonical order (1,1), (1,2), (2,1), (2,2).
DetectionEvent draw(const JointProbabilities& p, double u, std::uint64_t trial);

/// n i.i.d. events; identical (p, n, seed) gives an identical stream.
std::vector<DetectionEvent> sample_events(const JointProbabilities& p, std::uint64_t n,
                                          std::uint64_t seed);

/// Sharded variant: shard k draws its share with seed + k on its own thread.
/// Deterministic, but a different stream from sample_events unless shards == 1.
std::vector<DetectionEvent> sample_events_sharded(const JointProbabilities& p, std::uint64_t n,
                                                  std::uint64_t seed, unsigned shards);

/// Throws on an empty sequence.
CoincidenceTally tally(std::span<const DetectionEvent> events, std::uint64_t seed = 0);

/// tally(sample_events(p, n, seed)) without materializing the events.
CoincidenceTally sample_tally(const JointProbabilities& p, std::uint64_t n, std::uint64_t seed);

/// FNV-1a over (trial, d_s, d_a) of each event; a compact stream fingerprint.
std::uint64_t stream_digest(std::span<const DetectionEvent> events,
                            std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace rtm::measurement
