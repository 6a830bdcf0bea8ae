#pragma once

// Preconfigured runs of the interferometer with pass/fail verdicts.

#include <optional>
#include <string>
#include <vector>

#include "rtm/analysis.hpp"

namespace rtm::experiments {

using analysis::FringeScan;
using analysis::SweepAxis;
using measurement::CoincidenceTally;
using measurement::DetectionEvent;
using optics::PhaseSettings;
using optics::SourceKind;

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Preset { rtm, product_control, mixture_control, delayed_choice, cat };

std::string to_string(Preset p);
std::optional<Preset> parse_preset(std::string_view name);

struct Sweep {
  SweepAxis axis = SweepAxis::delta;
  std::size_t points = 32;
};

struct ExperimentSpec {
  Preset preset = Preset::rtm;
  SourceKind source;
  PhaseSettings settings;
  bool which_path = false;
  std::uint64_t n_trials = 100000;  // per sweep point
  std::uint64_t seed = 1;
  std::optional<Sweep> sweep;
  double sigma_bound = 4.0;     // width of empirical verdict bounds, in sigmas
  bool record_events = false;   // keep the full event stream in the result

  /// Throws SpecError on preset-specific violations.
  void validate() const;
  /// The sweep actually used (explicit or the preset default).
  Sweep effective_sweep() const;
};

ExperimentSpec default_spec(Preset preset);

struct Verdict {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;

  /// passed <=> |measured - expected| <= tolerance
  static Verdict check(std::string name, double measured, double expected, double tolerance);
};

/// What a preset evaluates: the initial state, the circuit builder and where.
struct ExperimentPlan {
  linalg::DensityOperator source;
  optics::CircuitFn circuit = optics::circuit_unitary;
  std::vector<PhaseSettings> settings;
  SweepAxis axis = SweepAxis::delta;
};

ExperimentPlan make_plan(const ExperimentSpec& spec);

struct DelayedChoiceData {
  std::vector<PhaseSettings> settings;
  std::vector<CoincidenceTally> off;  // which-path detector off: no entanglement
  std::vector<CoincidenceTally> on;   // which-path detector on: measurement state
  std::vector<std::uint8_t> choices;  // per trial, 1 = on; only with record_events
};

struct CatData {
  std::array<double, 2> populations_s{};
  std::array<double, 2> populations_a{};
  analysis::LocalCoherence coherence_s;
  analysis::LocalCoherence coherence_a;
  measurement::JointProbabilities joint;
  CoincidenceTally sampled;
};

struct ExperimentResult {
  Preset preset = Preset::rtm;
  std::optional<FringeScan> scan;
  std::optional<DelayedChoiceData> delayed;
  std::optional<CatData> cat;
  std::vector<Verdict> verdicts;
  std::uint64_t event_digest = 0;
  std::vector<DetectionEvent> events;  // only with record_events

  bool all_passed() const;
};

/// Fills scan.empirical by sampling n_trials per point, point k seeded with
/// seed + k and trial numbers running across points. Returns the stream
/// digest; appends the events when `events` is non-null.
std::uint64_t sample_scan(FringeScan& scan, std::uint64_t n_trials, std::uint64_t seed,
                          std::vector<DetectionEvent>* events = nullptr);

/// Largest |p̂ - p| / sigma over the scan for the given quantities, sigma being
/// the binomial standard deviation at the analytic p (exact match required
/// where sigma = 0).
double max_deviation_z(const FringeScan& scan, std::initializer_list<analysis::Quantity> qs);

ExperimentResult run_rtm(const ExperimentSpec& spec);
ExperimentResult run_controls(const ExperimentSpec& spec);
ExperimentResult run_delayed_choice(const ExperimentSpec& spec);
ExperimentResult run_cat(const ExperimentSpec& spec);

/// Dispatches on spec.preset.
ExperimentResult run(const ExperimentSpec& spec);

}  // namespace rtm::experiments
