#pragma once

// Flat "key = value" run configuration with '#' comments. Unknown or repeated
// keys are errors; missing keys take the preset defaults.
//
// Keys:
//   preset            rtm | product_control | mixture_control | delayed_choice | cat
//   source            entangled | product | mixture     (default follows preset)
//   amp1, amp2        real amplitude magnitudes (signed), default 1/sqrt(2)
//   amp1_phase, amp2_phase   radians, default 0
//   phi_s, phi_a      base phase settings, radians
//   which_path        bool (delayed_choice only)
//   n_trials          trials per sweep point
//   seed              64-bit unsigned
//   sweep_axis        phi_s | phi_a | delta
//   sweep_points      positive integer
//   sigma_bound       width of empirical verdict bounds in sigmas (default 4)
//   chsh_phi_s, chsh_phi_s_prime, chsh_phi_a, chsh_phi_a_prime   radians
//   expect_violation  bool, Bell command expectation (default: entangled source)
//   record_events     bool, also write the detection event stream
//   out               output directory
//   quiet             bool
//
// Real values accept arithmetic with pi and sqrt(), e.g. "3*pi/4" or "sqrt(0.9)".

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rtm/experiments.hpp"

namespace rtm::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChshSettings {
  double phi_s = 0.0;
  double phi_s_prime = std::numbers::pi / 2.0;
  double phi_a = std::numbers::pi / 4.0;
  double phi_a_prime = 3.0 * std::numbers::pi / 4.0;
};

struct RunConfig {
  experiments::ExperimentSpec spec;
  ChshSettings chsh;
  std::optional<bool> expect_violation;
  std::string out_dir = "rtm_out";
  bool quiet = false;
};

/// Evaluates a real-valued expression: numbers, pi, + - * /, parentheses, sqrt().
double parse_real(std::string_view text);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace rtm::config
