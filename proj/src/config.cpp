#include "rtm/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rtm::config {

namespace {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    if (!std::isfinite(v)) fail("value is not finite");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot parse number '" + std::string(s_) + "': " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    skip_ws();
    if (s_.substr(pos_, w.size()) != w) return false;
    const auto end = pos_ + w.size();
    if (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) return false;
    pos_ = end;
    return true;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  double primary() {
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (accept_word("pi")) return std::numbers::pi;
    if (accept_word("sqrt")) {
      if (!accept('(')) fail("expected '(' after sqrt");
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      if (v < 0.0) fail("sqrt of a negative value");
      return std::sqrt(v);
    }
    skip_ws();
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    if (accept_word("pi")) v *= std::numbers::pi;  // "3pi"
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::set<std::string, std::less<>> kKeys = {
    "preset",      "source",           "amp1",       "amp2",
    "amp1_phase",  "amp2_phase",       "phi_s",      "phi_a",
    "which_path",  "n_trials",         "seed",       "sweep_axis",
    "sweep_points", "sigma_bound",     "chsh_phi_s", "chsh_phi_s_prime",
    "chsh_phi_a",  "chsh_phi_a_prime", "expect_violation", "record_events",
    "out",         "quiet"};

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

double parse_real_key(const std::string& key, const std::string& v) {
  try {
    return parse_real(v);
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

}  // namespace

double parse_real(std::string_view text) { return ExprParser(text).parse(); }

RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key(trim(l.substr(0, eq)));
    const std::string value(trim(l.substr(eq + 1)));
    if (!kKeys.contains(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' has no value");
    if (!kv.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  experiments::Preset preset = experiments::Preset::rtm;
  if (const auto* v = get("preset")) {
    const auto p = experiments::parse_preset(*v);
    if (!p) throw ConfigError("key 'preset': unknown preset '" + *v + "'");
    preset = *p;
  }
  RunConfig cfg;
  cfg.spec = experiments::default_spec(preset);
  auto& spec = cfg.spec;

  if (const auto* v = get("source")) {
    if (*v == "entangled")
      spec.source.tag = optics::SourceTag::entangled;
    else if (*v == "product")
      spec.source.tag = optics::SourceTag::product;
    else if (*v == "mixture")
      spec.source.tag = optics::SourceTag::mixture;
    else
      throw ConfigError("key 'source': unknown source '" + *v + "'");
  }

  const auto real_or = [&](const char* key, double fallback) {
    const auto* v = get(key);
    return v ? parse_real_key(key, *v) : fallback;
  };
  if (get("amp1") || get("amp2") || get("amp1_phase") || get("amp2_phase")) {
    const double r = 1.0 / std::numbers::sqrt2;
    spec.source.amp1 = std::polar(1.0, real_or("amp1_phase", 0.0)) * real_or("amp1", r);
    spec.source.amp2 = std::polar(1.0, real_or("amp2_phase", 0.0)) * real_or("amp2", r);
  }
  spec.settings.phi_s = real_or("phi_s", spec.settings.phi_s);
  spec.settings.phi_a = real_or("phi_a", spec.settings.phi_a);
  if (const auto* v = get("which_path")) spec.which_path = parse_bool("which_path", *v);
  if (const auto* v = get("n_trials")) spec.n_trials = parse_unsigned("n_trials", *v);
  if (const auto* v = get("seed")) spec.seed = parse_unsigned("seed", *v);
  spec.sigma_bound = real_or("sigma_bound", spec.sigma_bound);
  if (const auto* v = get("record_events")) spec.record_events = parse_bool("record_events", *v);

  if (get("sweep_axis") || get("sweep_points")) {
    auto sweep = spec.effective_sweep();
    if (const auto* v = get("sweep_axis")) {
      if (*v == "phi_s")
        sweep.axis = analysis::SweepAxis::phi_s;
      else if (*v == "phi_a")
        sweep.axis = analysis::SweepAxis::phi_a;
      else if (*v == "delta")
        sweep.axis = analysis::SweepAxis::delta;
      else
        throw ConfigError("key 'sweep_axis': unknown axis '" + *v + "'");
    }
    if (const auto* v = get("sweep_points")) {
      sweep.points = parse_unsigned("sweep_points", *v);
      if (sweep.points == 0) throw ConfigError("key 'sweep_points': must be positive");
    }
    spec.sweep = sweep;
  }

  cfg.chsh.phi_s = real_or("chsh_phi_s", cfg.chsh.phi_s);
  cfg.chsh.phi_s_prime = real_or("chsh_phi_s_prime", cfg.chsh.phi_s_prime);
  cfg.chsh.phi_a = real_or("chsh_phi_a", cfg.chsh.phi_a);
  cfg.chsh.phi_a_prime = real_or("chsh_phi_a_prime", cfg.chsh.phi_a_prime);
  if (const auto* v = get("expect_violation"))
    cfg.expect_violation = parse_bool("expect_violation", *v);
  if (const auto* v = get("out")) cfg.out_dir = *v;
  if (const auto* v = get("quiet")) cfg.quiet = parse_bool("quiet", *v);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rtm::config
