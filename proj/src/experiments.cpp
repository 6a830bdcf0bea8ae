#include "rtm/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rtm/rng.hpp"

namespace rtm::experiments {

using analysis::Quantity;
using measurement::JointProbabilities;

namespace {

constexpr double kAnalyticTol = linalg::kStructuralTol;
constexpr std::size_t kAuditGrid = 16;

struct Sampler {
  explicit Sampler(bool keep_events) : record(keep_events) {}

  bool record = false;
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  std::vector<DetectionEvent> events;

  void push(const DetectionEvent& e) {
    digest = measurement::stream_digest(std::span{&e, 1}, digest);
    if (record) events.push_back(e);
  }
};

Verdict empirical_visibility_verdict(std::string name, const FringeScan& scan, Quantity q,
                                     double expected, double sigma_bound) {
  const auto v = analysis::empirical_visibility(scan, q);
  return Verdict::check(std::move(name), v.value, expected, sigma_bound * v.sigma);
}

ExperimentResult finish(ExperimentResult r, Sampler& sampler) {
  r.event_digest = sampler.digest;
  r.events = std::move(sampler.events);
  return r;
}

void require_preset(const ExperimentSpec& spec, std::initializer_list<Preset> allowed) {
  for (auto p : allowed)
    if (spec.preset == p) return;
  throw SpecError("preset " + to_string(spec.preset) + " is not handled by this runner");
}

}  // namespace

std::uint64_t sample_scan(FringeScan& scan, std::uint64_t n_trials, std::uint64_t seed,
                          std::vector<DetectionEvent>* events) {
  if (n_trials == 0) throw SpecError("n_trials must be positive");
  scan.validate();
  scan.empirical.clear();
  Sampler sampler{events != nullptr};
  for (std::size_t k = 0; k < scan.settings.size(); ++k) {
    Xoshiro256 rng(seed + k);
    CoincidenceTally t;
    t.seed = seed + k;
    t.n_trials = n_trials;
    for (std::uint64_t i = 0; i < n_trials; ++i) {
      const auto e = measurement::draw(scan.analytic[k], rng.uniform(), k * n_trials + i);
      ++t.counts[e.d_s - 1][e.d_a - 1];
      sampler.push(e);
    }
    scan.empirical.push_back(t);
  }
  if (events) events->insert(events->end(), sampler.events.begin(), sampler.events.end());
  return sampler.digest;
}

double max_deviation_z(const FringeScan& scan, std::initializer_list<Quantity> qs) {
  if (scan.empirical.size() != scan.settings.size())
    throw SpecError("scan has no empirical tallies");
  double worst = 0.0;
  for (std::size_t k = 0; k < scan.settings.size(); ++k) {
    const auto& t = scan.empirical[k];
    for (auto q : qs) {
      const double p = analysis::quantity(scan.analytic[k], q);
      const double f = static_cast<double>(analysis::quantity_count(t, q)) /
                       static_cast<double>(t.n_trials);
      const double sigma = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(t.n_trials));
      const double diff = std::abs(f - p);
      double z = 0.0;
      if (sigma > 0.0)
        z = diff / sigma;
      else if (diff > 0.0)
        z = std::numeric_limits<double>::infinity();
      worst = std::max(worst, z);
    }
  }
  return worst;
}

std::string to_string(Preset p) {
  switch (p) {
    case Preset::rtm: return "rtm";
    case Preset::product_control: return "product_control";
    case Preset::mixture_control: return "mixture_control";
    case Preset::delayed_choice: return "delayed_choice";
    case Preset::cat: return "cat";
  }
  return "?";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (auto p : {Preset::rtm, Preset::product_control, Preset::mixture_control,
                 Preset::delayed_choice, Preset::cat})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

Sweep ExperimentSpec::effective_sweep() const {
  if (sweep) return *sweep;
  switch (preset) {
    case Preset::product_control:
    case Preset::delayed_choice: return {SweepAxis::phi_s, 32};
    default: return {SweepAxis::delta, 32};
  }
}

void ExperimentSpec::validate() const {
  try {
    source.validate();
  } catch (const linalg::LinalgError& e) {
    throw SpecError(e.what());
  }
  if (n_trials == 0) throw SpecError("n_trials must be positive");
  if (!std::isfinite(settings.phi_s) || !std::isfinite(settings.phi_a))
    throw SpecError("phase settings must be finite");
  if (!(sigma_bound >= 0.0)) throw SpecError("sigma_bound must be non-negative");
  if (preset == Preset::delayed_choice) {
    if (!which_path) throw SpecError("delayed_choice requires which_path toggling");
  } else if (which_path) {
    throw SpecError("which_path toggling is only valid for the delayed_choice preset");
  }
  const auto sw = effective_sweep();
  if (sw.points == 0) throw SpecError("sweep points must be positive");
  switch (preset) {
    case Preset::rtm:
      if (source.tag != optics::SourceTag::entangled)
        throw SpecError("rtm preset needs an entangled source");
      break;
    case Preset::product_control:
      if (source.tag != optics::SourceTag::product)
        throw SpecError("product_control preset needs a product source");
      break;
    case Preset::mixture_control:
      if (source.tag != optics::SourceTag::mixture)
        throw SpecError("mixture_control preset needs a mixture source");
      break;
    case Preset::delayed_choice:
    case Preset::cat:
      if (source.tag != optics::SourceTag::entangled)
        throw SpecError(to_string(preset) + " preset needs an entangled source");
      break;
  }
  if (preset != Preset::cat && sw.points < 8)
    throw SpecError("visibility verdicts need at least 8 sweep points");
}

ExperimentSpec default_spec(Preset preset) {
  ExperimentSpec spec;
  spec.preset = preset;
  switch (preset) {
    case Preset::rtm:
    case Preset::cat: spec.source = optics::measurement_state_source(); break;
    case Preset::product_control: spec.source = optics::product_source(); break;
    case Preset::mixture_control: spec.source = optics::mixture_source(); break;
    case Preset::delayed_choice:
      spec.source = optics::measurement_state_source();
      spec.which_path = true;
      spec.n_trials = 200000;
      break;
  }
  return spec;
}

Verdict Verdict::check(std::string name, double measured, double expected, double tolerance) {
  return {std::move(name), std::abs(measured - expected) <= tolerance, measured, expected,
          tolerance};
}

bool ExperimentResult::all_passed() const {
  for (const auto& v : verdicts)
    if (!v.passed) return false;
  return !verdicts.empty();
}

ExperimentPlan make_plan(const ExperimentSpec& spec) {
  spec.validate();
  const auto sw = spec.effective_sweep();
  return {optics::source_density(spec.source), optics::circuit_unitary,
          analysis::sweep_settings(spec.settings, sw.axis, sw.points), sw.axis};
}

ExperimentResult run_rtm(const ExperimentSpec& spec) {
  require_preset(spec, {Preset::rtm});
  const auto plan = make_plan(spec);
  ExperimentResult r;
  r.preset = spec.preset;
  Sampler sampler{spec.record_events};

  auto scan = analysis::analytic_scan(plan.source, plan.settings, plan.axis, plan.circuit);
  sampler.digest = sample_scan(scan, spec.n_trials, spec.seed, spec.record_events ? &sampler.events : nullptr);

  const auto audit = analysis::no_signaling_audit(
      analysis::phase_grid(kAuditGrid), [&](const PhaseSettings& s) {
        return analysis::circuit_probabilities(plan.source, s, plan.circuit);
      });
  const auto bell = analysis::chsh_canonical(plan.source);

  r.verdicts = {
      Verdict::check("local_visibility_s", analysis::visibility(scan, Quantity::marg_s1), 0.0,
                     kAnalyticTol),
      Verdict::check("local_visibility_a", analysis::visibility(scan, Quantity::marg_a1), 0.0,
                     kAnalyticTol),
      Verdict::check("coincidence_visibility", analysis::visibility(scan, 1, 1), 1.0,
                     kAnalyticTol),
      Verdict::check("no_signaling_audit", audit, 0.0, kAnalyticTol),
      Verdict::check("chsh_abs_s", std::abs(bell.s_value), analysis::kTsirelson,
                     analysis::kChshTol),
      empirical_visibility_verdict("empirical_coincidence_visibility", scan, Quantity::p11, 1.0,
                                   spec.sigma_bound),
      Verdict::check("empirical_marginal_max_z",
                     max_deviation_z(scan, {Quantity::marg_s1, Quantity::marg_a1}), 0.0,
                     spec.sigma_bound),
  };
  r.scan = std::move(scan);
  return finish(std::move(r), sampler);
}

ExperimentResult run_controls(const ExperimentSpec& spec) {
  require_preset(spec, {Preset::product_control, Preset::mixture_control});
  const auto plan = make_plan(spec);
  ExperimentResult r;
  r.preset = spec.preset;
  Sampler sampler{spec.record_events};

  auto scan = analysis::analytic_scan(plan.source, plan.settings, plan.axis, plan.circuit);
  sampler.digest = sample_scan(scan, spec.n_trials, spec.seed, spec.record_events ? &sampler.events : nullptr);

  if (spec.preset == Preset::product_control) {
    const auto audit = analysis::no_signaling_audit(
        analysis::phase_grid(kAuditGrid), [&](const PhaseSettings& s) {
          return analysis::circuit_probabilities(plan.source, s, plan.circuit);
        });
    // The swept photon interferes locally; its partner's statistics do not move.
    const bool sweeps_s = plan.axis != SweepAxis::phi_a;
    const auto swept = sweeps_s ? Quantity::marg_s1 : Quantity::marg_a1;
    const auto other = sweeps_s ? Quantity::marg_a1 : Quantity::marg_s1;
    r.verdicts = {
        Verdict::check("local_visibility_swept", analysis::visibility(scan, swept), 1.0,
                       kAnalyticTol),
        Verdict::check("local_visibility_partner", analysis::visibility(scan, other), 0.0,
                       kAnalyticTol),
        Verdict::check("no_signaling_audit", audit, 0.0, kAnalyticTol),
        empirical_visibility_verdict("empirical_local_visibility_swept", scan, swept, 1.0,
                                     spec.sigma_bound),
        Verdict::check("empirical_marginal_max_z",
                       max_deviation_z(scan, {Quantity::marg_s1, Quantity::marg_a1}), 0.0,
                       spec.sigma_bound),
    };
  } else {
    const auto ms = optics::source_density(optics::measurement_state_source());
    const auto ms_scan = analysis::analytic_scan(ms, plan.settings, plan.axis, plan.circuit);
    double marginal_gap = 0.0;
    for (std::size_t k = 0; k < plan.settings.size(); ++k) {
      const auto a = measurement::marginals(scan.analytic[k]);
      const auto b = measurement::marginals(ms_scan.analytic[k]);
      for (std::size_t i = 0; i < 2; ++i)
        marginal_gap = std::max({marginal_gap, std::abs(a.s[i] - b.s[i]), std::abs(a.a[i] - b.a[i])});
    }
    r.verdicts = {
        Verdict::check("local_visibility_s", analysis::visibility(scan, Quantity::marg_s1), 0.0,
                       kAnalyticTol),
        Verdict::check("local_visibility_a", analysis::visibility(scan, Quantity::marg_a1), 0.0,
                       kAnalyticTol),
        Verdict::check("coincidence_visibility", analysis::visibility(scan, 1, 1), 0.0,
                       kAnalyticTol),
        Verdict::check("marginals_match_measurement_state", marginal_gap, 0.0, kAnalyticTol),
        empirical_visibility_verdict("empirical_coincidence_visibility", scan, Quantity::p11, 0.0,
                                     spec.sigma_bound),
        Verdict::check("empirical_marginal_max_z",
                       max_deviation_z(scan, {Quantity::marg_s1, Quantity::marg_a1}), 0.0,
                       spec.sigma_bound),
    };
  }
  r.scan = std::move(scan);
  return finish(std::move(r), sampler);
}

ExperimentResult run_delayed_choice(const ExperimentSpec& spec) {
  require_preset(spec, {Preset::delayed_choice});
  const auto plan = make_plan(spec);
  const auto off_source = optics::source_density(optics::product_source());

  ExperimentResult r;
  r.preset = spec.preset;
  Sampler sampler{spec.record_events};

  const auto on_scan = analysis::analytic_scan(plan.source, plan.settings, plan.axis, plan.circuit);
  const auto off_scan = analysis::analytic_scan(off_source, plan.settings, plan.axis, plan.circuit);

  DelayedChoiceData data;
  data.settings = plan.settings;
  const std::uint64_t n = spec.n_trials;
  for (std::size_t k = 0; k < plan.settings.size(); ++k) {
    // The coin is drawn after emission; only the bin decides the statistics.
    Xoshiro256 rng(spec.seed + k);
    CoincidenceTally off, on;
    off.seed = on.seed = spec.seed + k;
    for (std::uint64_t i = 0; i < n; ++i) {
      const bool detector_on = rng.uniform() < 0.5;
      const auto& p = detector_on ? on_scan.analytic[k] : off_scan.analytic[k];
      const auto e = measurement::draw(p, rng.uniform(), k * n + i);
      auto& t = detector_on ? on : off;
      ++t.counts[e.d_s - 1][e.d_a - 1];
      ++t.n_trials;
      sampler.digest ^= detector_on ? 0x9E3779B97F4A7C15ULL : 0ULL;
      sampler.push(e);
      if (spec.record_events) data.choices.push_back(detector_on ? 1 : 0);
    }
    if (off.n_trials == 0 || on.n_trials == 0)
      throw SpecError("delayed_choice needs enough trials to populate both bins");
    data.off.push_back(off);
    data.on.push_back(on);
  }

  auto bin_scan = [&](const FringeScan& analytic, const std::vector<CoincidenceTally>& tallies) {
    FringeScan s = analytic;
    s.empirical = tallies;
    return s;
  };
  const auto off_bin = bin_scan(off_scan, data.off);
  const auto on_bin = bin_scan(on_scan, data.on);
  const auto swept = plan.axis == SweepAxis::phi_a ? Quantity::marg_a1 : Quantity::marg_s1;

  r.verdicts = {
      Verdict::check("off_bin_local_visibility", analysis::visibility(off_bin, swept), 1.0,
                     kAnalyticTol),
      Verdict::check("on_bin_local_visibility", analysis::visibility(on_bin, swept), 0.0,
                     kAnalyticTol),
      empirical_visibility_verdict("off_bin_empirical_local_visibility", off_bin, swept, 1.0,
                                   spec.sigma_bound),
      empirical_visibility_verdict("on_bin_empirical_local_visibility", on_bin, swept, 0.0,
                                   spec.sigma_bound),
  };
  r.delayed = std::move(data);
  r.scan = on_bin;
  return finish(std::move(r), sampler);
}

ExperimentResult run_cat(const ExperimentSpec& spec) {
  require_preset(spec, {Preset::cat});
  spec.validate();
  // Nucleus S, cat A; phases play no role, so no circuit is applied.
  const auto rho = optics::source_density(spec.source);
  ExperimentResult r;
  r.preset = spec.preset;
  Sampler sampler{spec.record_events};

  CatData data;
  const auto red_s = linalg::partial_trace(rho, 0);
  const auto red_a = linalg::partial_trace(rho, 1);
  data.populations_s = {red_s(0, 0).real(), red_s(1, 1).real()};
  data.populations_a = {red_a(0, 0).real(), red_a(1, 1).real()};
  data.coherence_s = analysis::local_coherence(red_s);
  data.coherence_a = analysis::local_coherence(red_a);
  data.joint = measurement::born_probabilities(rho);

  Xoshiro256 rng(spec.seed);
  data.sampled.seed = spec.seed;
  data.sampled.n_trials = spec.n_trials;
  for (std::uint64_t i = 0; i < spec.n_trials; ++i) {
    const auto e = measurement::draw(data.joint, rng.uniform(), i);
    ++data.sampled.counts[e.d_s - 1][e.d_a - 1];
    sampler.push(e);
  }

  const double w1 = std::norm(spec.source.amp1);
  const double w2 = std::norm(spec.source.amp2);
  const auto coh = [](const analysis::LocalCoherence& c) { return std::abs(c.q) + std::abs(c.p); };
  r.verdicts = {
      Verdict::check("coherence_s", coh(data.coherence_s), 0.0, kAnalyticTol),
      Verdict::check("coherence_a", coh(data.coherence_a), 0.0, kAnalyticTol),
      Verdict::check("population_s1", data.populations_s[0], w1, kAnalyticTol),
      Verdict::check("population_s2", data.populations_s[1], w2, kAnalyticTol),
      Verdict::check("population_a1", data.populations_a[0], w1, kAnalyticTol),
      Verdict::check("population_a2", data.populations_a[1], w2, kAnalyticTol),
      Verdict::check("anticorrelated_probability", data.joint(1, 2) + data.joint(2, 1), 0.0,
                     kAnalyticTol),
      Verdict::check("anticorrelated_sampled_count",
                     static_cast<double>(data.sampled.count(1, 2) + data.sampled.count(2, 1)), 0.0,
                     0.0),
  };
  r.cat = std::move(data);
  return finish(std::move(r), sampler);
}

ExperimentResult run(const ExperimentSpec& spec) {
  switch (spec.preset) {
    case Preset::rtm: return run_rtm(spec);
    case Preset::product_control:
    case Preset::mixture_control: return run_controls(spec);
    case Preset::delayed_choice: return run_delayed_choice(spec);
    case Preset::cat: return run_cat(spec);
  }
  throw SpecError("unknown preset");
}

}  // namespace rtm::experiments
