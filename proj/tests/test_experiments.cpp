#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "rtm/experiments.hpp"
#include "rtm/report.hpp"

using namespace rtm;
using namespace rtm::experiments;

namespace {
constexpr double kTol = 1e-12;

const Verdict& find(const ExperimentResult& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return v;
  FAIL("missing verdict " << name);
  return r.verdicts.front();
}

std::string csv(const ExperimentResult& r) {
  std::ostringstream os;
  report::write_result_csv(os, r);
  return os.str();
}

ExperimentSpec small(Preset p, std::uint64_t n = 20000) {
  auto s = default_spec(p);
  s.n_trials = n;
  return s;
}
}  // namespace

TEST_CASE("preset names round-trip") {
  for (auto p : {Preset::rtm, Preset::product_control, Preset::mixture_control,
                 Preset::delayed_choice, Preset::cat})
    CHECK(parse_preset(to_string(p)) == p);
  CHECK_FALSE(parse_preset("bell").has_value());
}

TEST_CASE("verdict check") {
  CHECK(Verdict::check("x", 1.0, 1.0, 0.0).passed);
  CHECK(Verdict::check("x", 1.1, 1.0, 0.1 + 1e-15).passed);
  CHECK_FALSE(Verdict::check("x", 1.2, 1.0, 0.1).passed);
  CHECK_FALSE(ExperimentResult{}.all_passed());
}

TEST_CASE("every preset passes at its defaults") {
  for (auto p : {Preset::rtm, Preset::product_control, Preset::mixture_control,
                 Preset::delayed_choice, Preset::cat}) {
    CAPTURE(to_string(p));
    const auto r = run(default_spec(p));
    CHECK(r.preset == p);
    CHECK(r.all_passed());
    for (const auto& v : r.verdicts) {
      CAPTURE(v.name);
      CHECK(v.passed);
    }
  }
}

TEST_CASE("rtm preset verdict values") {
  const auto r = run(small(Preset::rtm));
  CHECK(std::abs(find(r, "local_visibility_s").measured) <= kTol);
  CHECK(std::abs(find(r, "local_visibility_a").measured) <= kTol);
  CHECK(std::abs(find(r, "coincidence_visibility").measured - 1.0) <= kTol);
  CHECK(find(r, "no_signaling_audit").measured <= kTol);
  CHECK(std::abs(find(r, "chsh_abs_s").measured - 2.0 * std::numbers::sqrt2) <= 1e-9);
  REQUIRE(r.scan.has_value());
  CHECK(r.scan->settings.size() == 32);
  CHECK(r.scan->empirical.size() == 32);
}

TEST_CASE("a non-superposed source shows no coincidence fringe") {
  auto spec = small(Preset::rtm);
  spec.source.amp1 = 1.0;
  spec.source.amp2 = 0.0;
  const auto r = run(spec);
  CHECK(std::abs(find(r, "coincidence_visibility").measured) <= kTol);
  CHECK_FALSE(find(r, "coincidence_visibility").passed);
  CHECK_FALSE(r.all_passed());
}

TEST_CASE("product control shows interference only on the swept side") {
  const auto r = run(small(Preset::product_control));
  CHECK(std::abs(find(r, "local_visibility_swept").measured - 1.0) <= kTol);
  CHECK(std::abs(find(r, "local_visibility_partner").measured) <= kTol);
  CHECK(r.all_passed());

  auto spec = small(Preset::product_control);
  spec.sweep = Sweep{SweepAxis::phi_a, 16};
  CHECK(run(spec).all_passed());
}

TEST_CASE("mixture control has the same marginals but no coincidence fringe") {
  const auto r = run(small(Preset::mixture_control));
  CHECK(std::abs(find(r, "coincidence_visibility").measured) <= kTol);
  CHECK(find(r, "marginals_match_measurement_state").measured <= kTol);
  CHECK(r.all_passed());
}

TEST_CASE("delayed choice bins") {
  const auto r = run(small(Preset::delayed_choice, 100000));
  REQUIRE(r.delayed.has_value());
  const auto& d = *r.delayed;
  CHECK(d.off.size() == 32);
  CHECK(d.on.size() == 32);
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < 32; ++k) total += d.off[k].n_trials + d.on[k].n_trials;
  CHECK(total == 32u * 100000u);
  // Roughly half the trials fall in each bin.
  const double frac_on = static_cast<double>(d.on[0].n_trials) / 100000.0;
  CHECK(std::abs(frac_on - 0.5) < 5.0 * 0.5 / std::sqrt(100000.0));
  CHECK(std::abs(find(r, "off_bin_local_visibility").measured - 1.0) <= kTol);
  CHECK(std::abs(find(r, "on_bin_local_visibility").measured) <= kTol);
  CHECK(r.all_passed());
}

TEST_CASE("cat preset") {
  SUBCASE("equal weights") {
    const auto r = run(default_spec(Preset::cat));
    REQUIRE(r.cat.has_value());
    CHECK(std::abs(r.cat->populations_s[0] - 0.5) <= kTol);
    CHECK(std::abs(r.cat->populations_a[1] - 0.5) <= kTol);
    CHECK(r.cat->sampled.count(1, 2) + r.cat->sampled.count(2, 1) == 0);
    CHECK(r.all_passed());
  }
  SUBCASE("unequal weights") {
    auto spec = default_spec(Preset::cat);
    spec.source.amp1 = std::sqrt(0.9);
    spec.source.amp2 = std::sqrt(0.1);
    const auto r = run(spec);
    CHECK(std::abs(r.cat->populations_s[0] - 0.9) <= kTol);
    CHECK(std::abs(r.cat->populations_s[1] - 0.1) <= kTol);
    CHECK(std::abs(r.cat->populations_a[0] - 0.9) <= kTol);
    CHECK(r.all_passed());
  }
  SUBCASE("definite branch") {
    auto spec = default_spec(Preset::cat);
    spec.source.amp1 = 1.0;
    spec.source.amp2 = 0.0;
    const auto r = run(spec);
    CHECK(std::abs(r.cat->populations_s[0] - 1.0) <= kTol);
    CHECK(r.cat->sampled.count(1, 1) == spec.n_trials);
    CHECK(r.all_passed());
  }
  SUBCASE("complex amplitudes") {
    auto spec = default_spec(Preset::cat);
    spec.source.amp1 = std::polar(std::sqrt(0.3), 1.1);
    spec.source.amp2 = std::polar(std::sqrt(0.7), -0.4);
    const auto r = run(spec);
    CHECK(std::abs(r.cat->coherence_s.q) <= kTol);
    CHECK(std::abs(r.cat->coherence_a.p) <= kTol);
    CHECK(r.all_passed());
  }
}

TEST_CASE("runs are deterministic in the seed") {
  for (auto p : {Preset::rtm, Preset::delayed_choice, Preset::cat}) {
    CAPTURE(to_string(p));
    auto spec = small(p, 5000);
    spec.record_events = true;
    const auto a = run(spec);
    const auto b = run(spec);
    CHECK(csv(a) == csv(b));
    CHECK(a.event_digest == b.event_digest);
    CHECK(a.events == b.events);
    CHECK_FALSE(a.events.empty());
    spec.seed = 2;
    CHECK(run(spec).event_digest != a.event_digest);
  }
}

TEST_CASE("event recording does not change the statistics") {
  auto spec = small(Preset::rtm, 5000);
  const auto plain = run(spec);
  spec.record_events = true;
  const auto rec = run(spec);
  CHECK(csv(plain) == csv(rec));
  CHECK(plain.event_digest == rec.event_digest);
  CHECK(plain.events.empty());
  CHECK(rec.events.size() == 32u * 5000u);
  CHECK(rec.events.back().trial == 32u * 5000u - 1);
}

TEST_CASE("sample_scan seeds each point with seed + k") {
  auto spec = small(Preset::rtm, 1000);
  auto plan = make_plan(spec);
  auto scan = analysis::analytic_scan(plan.source, plan.settings, plan.axis);
  sample_scan(scan, 1000, 7);
  for (std::size_t k = 0; k < scan.settings.size(); ++k) {
    const auto t = measurement::sample_tally(scan.analytic[k], 1000, 7 + k);
    CHECK(t.counts == scan.empirical[k].counts);
  }
  CHECK(max_deviation_z(scan, {analysis::Quantity::marg_s1}) < 6.0);
}

TEST_CASE("all non-cat presets share one circuit builder") {
  const auto a = make_plan(default_spec(Preset::rtm));
  const auto b = make_plan(default_spec(Preset::product_control));
  const auto c = make_plan(default_spec(Preset::mixture_control));
  const auto d = make_plan(default_spec(Preset::delayed_choice));
  CHECK(a.circuit == b.circuit);
  CHECK(a.circuit == c.circuit);
  CHECK(a.circuit == d.circuit);
  CHECK(a.settings.size() == c.settings.size());
  for (std::size_t k = 0; k < a.settings.size(); ++k) {
    CHECK(a.settings[k].phi_s == c.settings[k].phi_s);
    CHECK(a.settings[k].phi_a == c.settings[k].phi_a);
  }
}

TEST_CASE("spec validation") {
  auto spec = default_spec(Preset::rtm);
  spec.which_path = true;
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::delayed_choice);
  spec.which_path = false;
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.source = optics::product_source();
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::mixture_control);
  spec.source = optics::measurement_state_source();
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.n_trials = 0;
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.sweep = Sweep{SweepAxis::delta, 4};
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.sigma_bound = -1.0;
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.source.amp1 = 1.0;
  spec.source.amp2 = 1.0;
  CHECK_THROWS_AS(run(spec), SpecError);

  spec = default_spec(Preset::rtm);
  spec.settings.phi_s = std::nan("");
  CHECK_THROWS_AS(run(spec), SpecError);

  CHECK_THROWS_AS(run_cat(default_spec(Preset::rtm)), SpecError);
}

TEST_CASE("sweep csv layout") {
  const auto r = run(small(Preset::rtm, 1000));
  const auto text = csv(r);
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line == report::kSweepHeader);
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 32);
  CHECK(report::format_number(std::numbers::pi) == "3.14159265358979");
  CHECK(report::format_number(0.5) == "0.5");
}
