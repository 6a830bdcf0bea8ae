#include <cmath>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "rtm/config.hpp"

using namespace rtm;
using namespace rtm::config;

namespace {
constexpr double kPi = std::numbers::pi;

std::string message_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("real expressions") {
  CHECK(parse_real("pi/4") == kPi / 4);
  CHECK(parse_real("3*pi/4") == 3 * kPi / 4);
  CHECK(parse_real("3pi") == 3 * kPi);
  CHECK(parse_real("-pi") == -kPi);
  CHECK(parse_real("sqrt(0.9)") == std::sqrt(0.9));
  CHECK(parse_real("1/sqrt(2)") == 1 / std::sqrt(2.0));
  CHECK(parse_real(" (1 + 2) * 3 ") == 9.0);
  CHECK(parse_real("1e-3") == 1e-3);
  CHECK(parse_real("2 - 3 - 4") == -5.0);
  CHECK(parse_real("8 / 4 / 2") == 1.0);
  for (const char* bad : {"", "pi pi", "1 +", "(1", "sqrt 2", "foo", "1..2", "*3"})
    CHECK_THROWS_AS(parse_real(bad), ConfigError);
}

TEST_CASE("defaults follow the preset") {
  const auto empty = parse_config("");
  CHECK(empty.spec.preset == experiments::Preset::rtm);
  CHECK(empty.spec.n_trials == 100000);
  CHECK(empty.spec.seed == 1);
  CHECK(empty.spec.sigma_bound == 4.0);
  CHECK_FALSE(empty.spec.sweep.has_value());
  CHECK_FALSE(empty.expect_violation.has_value());
  CHECK(empty.out_dir == "rtm_out");
  CHECK(empty.chsh.phi_a_prime == 3 * kPi / 4);

  const auto dc = parse_config("preset = delayed_choice");
  CHECK(dc.spec.which_path);
  CHECK(dc.spec.source.tag == optics::SourceTag::entangled);
  CHECK(dc.spec.effective_sweep().axis == analysis::SweepAxis::phi_s);

  const auto mix = parse_config("# control\npreset = mixture_control\n");
  CHECK(mix.spec.source.tag == optics::SourceTag::mixture);
}

TEST_CASE("full config") {
  const auto cfg = parse_config(R"(
    preset = rtm
    amp1 = sqrt(0.9)     # weight of |s1 a1>
    amp2 = sqrt(0.1)
    amp2_phase = pi/2
    phi_s = pi/3
    phi_a = -pi/6
    n_trials = 2500
    seed = 18446744073709551615
    sweep_axis = phi_a
    sweep_points = 64
    sigma_bound = 5
    chsh_phi_s = pi/8
    expect_violation = false
    record_events = yes
    out = /tmp/x
    quiet = on
  )");
  CHECK(std::abs(cfg.spec.source.amp1 - std::sqrt(0.9)) < 1e-15);
  CHECK(std::abs(cfg.spec.source.amp2 - std::complex<double>(0, std::sqrt(0.1))) < 1e-15);
  CHECK(cfg.spec.settings.phi_s == kPi / 3);
  CHECK(cfg.spec.settings.phi_a == -kPi / 6);
  CHECK(cfg.spec.n_trials == 2500);
  CHECK(cfg.spec.seed == 18446744073709551615ULL);
  REQUIRE(cfg.spec.sweep.has_value());
  CHECK(cfg.spec.sweep->axis == analysis::SweepAxis::phi_a);
  CHECK(cfg.spec.sweep->points == 64);
  CHECK(cfg.spec.sigma_bound == 5.0);
  CHECK(cfg.chsh.phi_s == kPi / 8);
  CHECK(cfg.expect_violation == false);
  CHECK(cfg.spec.record_events);
  CHECK(cfg.out_dir == "/tmp/x");
  CHECK(cfg.quiet);
  CHECK_NOTHROW(cfg.spec.validate());
}

TEST_CASE("unknown keys are named in the error") {
  const auto msg = message_of("phi_s = 0\nphii_s = 1\n");
  CHECK(msg.find("phii_s") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("malformed configs") {
  CHECK(message_of("seed = 1\nseed = 2").find("duplicate key 'seed'") != std::string::npos);
  CHECK(message_of("seed").find("expected 'key = value'") != std::string::npos);
  CHECK(message_of("seed =").find("no value") != std::string::npos);
  CHECK(message_of("seed = -1").find("seed") != std::string::npos);
  CHECK(message_of("n_trials = 1.5").find("n_trials") != std::string::npos);
  CHECK(message_of("quiet = maybe").find("boolean") != std::string::npos);
  CHECK(message_of("preset = bell").find("unknown preset") != std::string::npos);
  CHECK(message_of("source = laser").find("unknown source") != std::string::npos);
  CHECK(message_of("sweep_axis = theta").find("unknown axis") != std::string::npos);
  CHECK(message_of("sweep_points = 0").find("sweep_points") != std::string::npos);
  CHECK(message_of("phi_s = pie").find("phi_s") != std::string::npos);
}

TEST_CASE("load_config reads files") {
  const auto path = std::filesystem::temp_directory_path() / "rtm_test_config.cfg";
  {
    std::ofstream out(path);
    out << "preset = cat\nn_trials = 10\n";
  }
  const auto cfg = load_config(path);
  CHECK(cfg.spec.preset == experiments::Preset::cat);
  CHECK(cfg.spec.n_trials == 10);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}
