#include "rtm/measurement.hpp"

#include <cmath>
#include <thread>

#include "rtm/rng.hpp"

namespace rtm::measurement {

namespace {

constexpr double kTol = linalg::kStructuralTol;

void require_two_qubits(const linalg::Dims& dims) {
  if (dims != linalg::Dims{2, 2})
    throw MeasurementError("detector statistics need a two-photon state with factor_dims {2, 2}");
}

}  // namespace

JointProbabilities::JointProbabilities(const Table& table) : table_(table) {
  for (const auto& row : table_)
    for (double v : row)
      if (!std::isfinite(v) || v < -kTol || v > 1.0 + kTol)
        throw MeasurementError("joint probability outside [0, 1]");
  if (std::abs(sum() - 1.0) > kTol) throw MeasurementError("joint probabilities do not sum to 1");
}

JointProbabilities JointProbabilities::unchecked(const Table& table) {
  JointProbabilities p;
  p.table_ = table;
  return p;
}

double JointProbabilities::sum() const {
  return table_[0][0] + table_[0][1] + table_[1][0] + table_[1][1];
}

double CoincidenceTally::frequency(int ds, int da) const {
  return static_cast<double>(count(ds, da)) / static_cast<double>(n_trials);
}

double CoincidenceTally::standard_error(int ds, int da) const {
  const double f = frequency(ds, da);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(n_trials));
}

JointProbabilities CoincidenceTally::estimate() const {
  return JointProbabilities({{{frequency(1, 1), frequency(1, 2)},
                              {frequency(2, 1), frequency(2, 2)}}});
}

JointProbabilities born_probabilities(const linalg::StateVector& state) {
  require_two_qubits(state.factor_dims());
  return JointProbabilities({{{std::norm(state[0]), std::norm(state[1])},
                              {std::norm(state[2]), std::norm(state[3])}}});
}

JointProbabilities born_probabilities(const linalg::DensityOperator& state) {
  require_two_qubits(state.factor_dims());
  return JointProbabilities({{{state(0, 0).real(), state(1, 1).real()},
                              {state(2, 2).real(), state(3, 3).real()}}});
}

Marginals marginals(const JointProbabilities& p) {
  Marginals m;
  m.s = {p(1, 1) + p(1, 2), p(2, 1) + p(2, 2)};
  m.a = {p(1, 1) + p(2, 1), p(1, 2) + p(2, 2)};
  return m;
}

DetectionEvent draw(const JointProbabilities& p, double u, std::uint64_t trial) {
  static constexpr std::array<std::pair<int, int>, 4> kOrder{{{1, 1}, {1, 2}, {2, 1}, {2, 2}}};
  double cumulative = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < kOrder.size(); ++k) {
    const double w = p(kOrder[k].first, kOrder[k].second);
    if (w <= 0.0) continue;
    last_nonzero = k;
    cumulative += w;
    if (u < cumulative)
      return {trial, static_cast<std::uint8_t>(kOrder[k].first),
              static_cast<std::uint8_t>(kOrder[k].second)};
  }
  // Roundoff left the cumulative sum just below u.
  return {trial, static_cast<std::uint8_t>(kOrder[last_nonzero].first),
          static_cast<std::uint8_t>(kOrder[last_nonzero].second)};
}

std::vector<DetectionEvent> sample_events(const JointProbabilities& p, std::uint64_t n,
                                          std::uint64_t seed) {
  if (n == 0) throw MeasurementError("sample_events needs n >= 1");
  Xoshiro256 rng(seed);
  std::vector<DetectionEvent> events;
  events.reserve(n);
  for (std::uint64_t t = 0; t < n; ++t) events.push_back(draw(p, rng.uniform(), t));
  return events;
}

std::vector<DetectionEvent> sample_events_sharded(const JointProbabilities& p, std::uint64_t n,
                                                  std::uint64_t seed, unsigned shards) {
  if (n == 0) throw MeasurementError("sample_events needs n >= 1");
  if (shards <= 1) return sample_events(p, n, seed);
  std::vector<DetectionEvent> events(n);
  std::vector<std::jthread> workers;
  const std::uint64_t chunk = (n + shards - 1) / shards;
  for (unsigned k = 0; k < shards; ++k) {
    const std::uint64_t begin = std::min<std::uint64_t>(n, k * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk);
    workers.emplace_back([&events, &p, begin, end, shard_seed = seed + k] {
      Xoshiro256 rng(shard_seed);
      for (std::uint64_t t = begin; t < end; ++t) events[t] = draw(p, rng.uniform(), t);
    });
  }
  workers.clear();  // join before the buffer leaves scope
  return events;
}

CoincidenceTally tally(std::span<const DetectionEvent> events, std::uint64_t seed) {
  if (events.empty()) throw MeasurementError("cannot tally an empty event sequence");
  CoincidenceTally t;
  t.seed = seed;
  for (const auto& e : events) {
    if (e.d_s < 1 || e.d_s > 2 || e.d_a < 1 || e.d_a > 2)
      throw MeasurementError("detector label outside {1, 2}");
    ++t.counts[e.d_s - 1][e.d_a - 1];
  }
  t.n_trials = events.size();
  return t;
}

CoincidenceTally sample_tally(const JointProbabilities& p, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw MeasurementError("sample_events needs n >= 1");
  Xoshiro256 rng(seed);
  CoincidenceTally t;
  t.seed = seed;
  t.n_trials = n;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto e = draw(p, rng.uniform(), k);
    ++t.counts[e.d_s - 1][e.d_a - 1];
  }
  return t;
}

std::uint64_t stream_digest(std::span<const DetectionEvent> events, std::uint64_t basis) {
  std::uint64_t h = basis;
  auto mix = [&h](std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : events) {
    mix(e.trial, 8);
    mix(e.d_s, 1);
    mix(e.d_a, 1);
  }
  return h;
}

}  // namespace rtm::measurement
