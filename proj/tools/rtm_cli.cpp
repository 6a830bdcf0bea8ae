// rtm: command-line front end for the two-photon interferometer simulator.
//
//   rtm run   --config FILE [--out DIR] [--seed N] [--quiet]
//   rtm sweep --config FILE [--out DIR] [--seed N] [--quiet]
//   rtm bell  [--config FILE] [--out DIR] [--quiet]
//   rtm check [--quiet]
//
// Exit codes: 0 all verdicts pass, 1 a verdict or invariant failed,
// 2 usage or configuration error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rtm/analysis.hpp"
#include "rtm/config.hpp"
#include "rtm/experiments.hpp"
#include "rtm/invariants.hpp"
#include "rtm/report.hpp"

namespace fs = std::filesystem;
using namespace rtm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

config::RunConfig load(const CommonFlags& flags, bool config_required) {
  config::RunConfig cfg;
  if (!flags.config_path.empty())
    cfg = config::load_config(flags.config_path);
  else if (config_required)
    throw UsageError("--config is required");
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed) cfg.spec.seed = *flags.seed;
  if (flags.quiet) cfg.quiet = true;
  return cfg;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw UsageError("cannot write " + (dir / name).string());
  return out;
}

void write_events(const fs::path& dir, const std::string& name,
                  const experiments::ExperimentResult& result) {
  auto out = open_output(dir, name);
  const bool with_choice = result.delayed && !result.delayed->choices.empty();
  out << (with_choice ? "trial,d_s,d_a,which_path\n" : "trial,d_s,d_a\n");
  for (std::size_t k = 0; k < result.events.size(); ++k) {
    const auto& e = result.events[k];
    out << e.trial << ',' << int{e.d_s} << ',' << int{e.d_a};
    if (with_choice) out << ',' << int{result.delayed->choices[k]};
    out << '\n';
  }
}

int cmd_run(const CommonFlags& flags) {
  const auto cfg = load(flags, true);
  const auto result = experiments::run(cfg.spec);
  const fs::path dir = cfg.out_dir;
  const auto name = experiments::to_string(cfg.spec.preset);
  {
    auto csv = open_output(dir, name + ".csv");
    report::write_result_csv(csv, result);
  }
  {
    auto txt = open_output(dir, name + "_verdicts.txt");
    report::write_verdicts(txt, result.verdicts);
  }
  if (cfg.spec.record_events) write_events(dir, name + "_events.csv", result);
  if (!cfg.quiet) {
    report::write_verdicts(std::cout, result.verdicts);
    std::cout << "event_digest=" << std::hex << result.event_digest << std::dec << '\n';
  }
  return result.all_passed() ? kExitOk : kExitFail;
}

int cmd_sweep(const CommonFlags& flags) {
  const auto cfg = load(flags, true);
  auto spec = cfg.spec;
  if (!spec.sweep) throw UsageError("sweep needs sweep_axis or sweep_points in the config");
  try {
    spec.source.validate();
  } catch (const linalg::LinalgError& e) {
    throw experiments::SpecError(e.what());
  }
  if (spec.n_trials == 0) throw experiments::SpecError("n_trials must be positive");

  const auto source = optics::source_density(spec.source);
  auto scan = analysis::analytic_scan(
      source, analysis::sweep_settings(spec.settings, spec.sweep->axis, spec.sweep->points),
      spec.sweep->axis);
  std::vector<measurement::DetectionEvent> events;
  const auto digest =
      experiments::sample_scan(scan, spec.n_trials, spec.seed, spec.record_events ? &events : nullptr);

  const fs::path dir = cfg.out_dir;
  {
    auto csv = open_output(dir, "sweep.csv");
    report::write_sweep_csv(csv, scan);
  }
  if (spec.record_events) {
    experiments::ExperimentResult r;
    r.events = std::move(events);
    write_events(dir, "sweep_events.csv", r);
  }

  using analysis::Quantity;
  std::vector<experiments::Verdict> verdicts{experiments::Verdict::check(
      "empirical_matches_analytic",
      experiments::max_deviation_z(scan, {Quantity::p11, Quantity::p12, Quantity::p21,
                                          Quantity::p22}),
      0.0, spec.sigma_bound)};

  std::ostringstream info;
  for (auto [label, q] : {std::pair{"coincidence_visibility", Quantity::p11},
                          std::pair{"local_visibility_s", Quantity::marg_s1},
                          std::pair{"local_visibility_a", Quantity::marg_a1}}) {
    try {
      info << label << '=' << report::format_number(analysis::visibility(scan, q)) << '\n';
    } catch (const analysis::AnalysisError& e) {
      info << label << "=not-computable (" << e.what() << ")\n";
    }
  }
  {
    auto txt = open_output(dir, "sweep_verdicts.txt");
    report::write_verdicts(txt, verdicts);
    txt << info.str();
  }
  if (!cfg.quiet) {
    report::write_verdicts(std::cout, verdicts);
    std::cout << info.str() << "event_digest=" << std::hex << digest << std::dec << '\n';
  }
  return verdicts.front().passed ? kExitOk : kExitFail;
}

int cmd_bell(const CommonFlags& flags) {
  const auto cfg = load(flags, false);
  const auto source = optics::source_density(cfg.spec.source);
  const auto& c = cfg.chsh;
  const auto result = analysis::chsh(c.phi_s, c.phi_s_prime, c.phi_a, c.phi_a_prime, source);
  const bool expect =
      cfg.expect_violation.value_or(cfg.spec.source.tag == optics::SourceTag::entangled);
  const bool violated = result.violates();

  if (!flags.out_dir.empty() || !flags.config_path.empty()) {
    auto csv = open_output(cfg.out_dir, "bell.csv");
    report::write_bell_csv(csv, result);
  }
  if (!cfg.quiet) {
    static constexpr const char* kTerms[4] = {"E(s,a)", "E(s,a')", "E(s',a)", "E(s',a')"};
    for (std::size_t k = 0; k < 4; ++k)
      std::cout << kTerms[k] << " = " << report::format_number(result.correlations[k]) << '\n';
    std::cout << "S = " << report::format_number(result.s_value) << '\n'
              << "|S| = " << report::format_number(std::abs(result.s_value)) << '\n'
              << (violated ? "Bell violation (|S| > 2)" : "no violation (|S| <= 2)") << '\n';
  }
  return violated == expect ? kExitOk : kExitFail;
}

int cmd_check(const CommonFlags& flags, double fault) {
  invariants::SuiteOptions opt;
  if (flags.seed) opt.seed = *flags.seed;
  opt.beam_splitter_fault = fault;
  const auto results = invariants::run_suite(opt);
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    if (!flags.quiet || !r.passed)
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << '\n';
  }
  std::cout << passed << '/' << results.size() << " invariants passed\n";
  return passed == results.size() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon interferometry simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  double fault = 0.0;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", flags.config_path, "Run configuration (key = value)");
    sub->add_option("--out", flags.out_dir, "Output directory");
    if (with_seed) sub->add_option("--seed", flags.seed, "RNG seed (overrides the config)");
    sub->add_flag("--quiet", flags.quiet, "Only report failures");
  };
  auto* run = app.add_subcommand("run", "Run a preset and write its table and verdicts");
  auto* sweep = app.add_subcommand("sweep", "Sweep a phase and write per-point statistics");
  auto* bell = app.add_subcommand("bell", "Evaluate the CHSH statistic");
  auto* check = app.add_subcommand("check", "Run the invariant self-check suite");
  add_common(run, true);
  add_common(sweep, true);
  add_common(bell, false);
  check->add_option("--seed", flags.seed, "Seed for randomized invariants");
  check->add_flag("--quiet", flags.quiet, "Only report failures");
  check->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(flags);
    if (*sweep) return cmd_sweep(flags);
    if (*bell) return cmd_bell(flags);
    if (*check) return cmd_check(flags, fault);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const experiments::SpecError& e) {
    std::cerr << "invalid experiment: " << e.what() << '\n';
    return kExitUsage;
  } catch (const linalg::LinalgError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
