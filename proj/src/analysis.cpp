#include "rtm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace rtm::analysis {

using linalg::DensityOperator;
using linalg::Matrix;
using measurement::Marginals;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double phi) {
  double r = std::fmod(phi, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

}  // namespace

double coincidence_law(double delta_phi, Pairing pairing) {
  const double c = std::cos(delta_phi);
  return pairing == Pairing::same ? (1.0 - c) / 4.0 : (1.0 + c) / 4.0;
}

JointProbabilities circuit_probabilities(const DensityOperator& source,
                                         const PhaseSettings& settings,
                                         optics::CircuitFn circuit) {
  return measurement::born_probabilities(linalg::evolve(circuit(settings), source));
}

std::vector<PhaseSettings> sweep_settings(const PhaseSettings& base, SweepAxis axis,
                                          std::size_t points) {
  if (points == 0) throw AnalysisError("sweep needs at least one point");
  std::vector<PhaseSettings> out;
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = kTwoPi * static_cast<double>(k) / static_cast<double>(points);
    PhaseSettings s = base;
    switch (axis) {
      case SweepAxis::phi_s: s.phi_s = base.phi_s + x; break;
      case SweepAxis::phi_a: s.phi_a = base.phi_a + x; break;
      case SweepAxis::delta: s.phi_s = base.phi_a + x; break;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<PhaseSettings> phase_grid(std::size_t n) {
  std::vector<PhaseSettings> grid;
  grid.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      grid.push_back({kTwoPi * static_cast<double>(i) / static_cast<double>(n),
                      kTwoPi * static_cast<double>(j) / static_cast<double>(n)});
  return grid;
}

double FringeScan::swept_phase(std::size_t k) const {
  const auto& s = settings.at(k);
  switch (axis) {
    case SweepAxis::phi_s: return s.phi_s;
    case SweepAxis::phi_a: return s.phi_a;
    case SweepAxis::delta: return s.delta();
  }
  return s.delta();
}

void FringeScan::validate() const {
  if (settings.empty()) throw AnalysisError("fringe scan has no settings");
  if (analytic.size() != settings.size())
    throw AnalysisError("analytic series length does not match settings");
  if (!empirical.empty() && empirical.size() != settings.size())
    throw AnalysisError("empirical series length does not match settings");
}

FringeScan analytic_scan(const DensityOperator& source, std::vector<PhaseSettings> settings,
                         SweepAxis axis, optics::CircuitFn circuit) {
  FringeScan scan;
  scan.axis = axis;
  scan.settings = std::move(settings);
  scan.analytic.reserve(scan.settings.size());
  for (const auto& s : scan.settings)
    scan.analytic.push_back(circuit_probabilities(source, s, circuit));
  scan.validate();
  return scan;
}

double quantity(const JointProbabilities& p, Quantity q) {
  switch (q) {
    case Quantity::p11: return p(1, 1);
    case Quantity::p12: return p(1, 2);
    case Quantity::p21: return p(2, 1);
    case Quantity::p22: return p(2, 2);
    case Quantity::marg_s1: return p(1, 1) + p(1, 2);
    case Quantity::marg_s2: return p(2, 1) + p(2, 2);
    case Quantity::marg_a1: return p(1, 1) + p(2, 1);
    case Quantity::marg_a2: return p(1, 2) + p(2, 2);
  }
  return 0.0;
}

std::uint64_t quantity_count(const CoincidenceTally& t, Quantity q) {
  switch (q) {
    case Quantity::p11: return t.count(1, 1);
    case Quantity::p12: return t.count(1, 2);
    case Quantity::p21: return t.count(2, 1);
    case Quantity::p22: return t.count(2, 2);
    case Quantity::marg_s1: return t.count(1, 1) + t.count(1, 2);
    case Quantity::marg_s2: return t.count(2, 1) + t.count(2, 2);
    case Quantity::marg_a1: return t.count(1, 1) + t.count(2, 1);
    case Quantity::marg_a2: return t.count(1, 2) + t.count(2, 2);
  }
  return 0;
}

Quantity cell_quantity(int ds, int da) {
  if (ds < 1 || ds > 2 || da < 1 || da > 2) throw AnalysisError("detector cell outside {1,2}^2");
  static constexpr Quantity kCells[2][2] = {{Quantity::p11, Quantity::p12},
                                            {Quantity::p21, Quantity::p22}};
  return kCells[ds - 1][da - 1];
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::p11: return "p11";
    case Quantity::p12: return "p12";
    case Quantity::p21: return "p21";
    case Quantity::p22: return "p22";
    case Quantity::marg_s1: return "marg_s1";
    case Quantity::marg_s2: return "marg_s2";
    case Quantity::marg_a1: return "marg_a1";
    case Quantity::marg_a2: return "marg_a2";
  }
  return "?";
}

double visibility(std::span<const double> series) {
  if (series.empty()) throw AnalysisError("visibility of an empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*hi + *lo <= 0.0) throw AnalysisError("visibility of an all-zero series");
  return (*hi - *lo) / (*hi + *lo);
}

void require_full_period(const FringeScan& scan) {
  scan.validate();
  const std::size_t n = scan.settings.size();
  if (n < 8) throw AnalysisError("visibility needs at least 8 sweep points");
  std::vector<double> phases;
  phases.reserve(n);
  for (std::size_t k = 0; k < n; ++k) phases.push_back(wrap(scan.swept_phase(k)));
  std::sort(phases.begin(), phases.end());
  double gap = phases.front() + kTwoPi - phases.back();
  for (std::size_t k = 1; k < n; ++k) gap = std::max(gap, phases[k] - phases[k - 1]);
  if (gap > std::numbers::pi / 4.0 + 1e-9)
    throw AnalysisError("sweep does not cover a full 2pi period");
}

double visibility(const FringeScan& scan, Quantity q) {
  require_full_period(scan);
  std::vector<double> series;
  series.reserve(scan.analytic.size());
  for (const auto& p : scan.analytic) series.push_back(quantity(p, q));
  return visibility(series);
}

double visibility(const FringeScan& scan, int ds, int da) {
  return visibility(scan, cell_quantity(ds, da));
}

EmpiricalVisibility empirical_visibility(std::span<const double> phases,
                                         std::span<const std::uint64_t> successes,
                                         std::span<const std::uint64_t> trials) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  if (phases.size() != successes.size() || phases.size() != trials.size())
    throw AnalysisError("empirical series lengths differ");
  if (n < 3) throw AnalysisError("fringe fit needs at least 3 points");

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  Eigen::VectorXd var(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (trials[k] == 0) throw AnalysisError("empirical point with zero trials");
    const double f = static_cast<double>(successes[k]) / static_cast<double>(trials[k]);
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(phases[k]);
    design(k, 2) = std::sin(phases[k]);
    y(k) = f;
    var(k) = f * (1.0 - f) / static_cast<double>(trials[k]);
  }
  const Eigen::MatrixXd normal = design.transpose() * design;
  const Eigen::MatrixXd solve = normal.ldlt().solve(design.transpose());
  const Eigen::Vector3d coef = solve * y;
  const Eigen::Matrix3d cov = solve * var.asDiagonal() * solve.transpose();

  const double c = coef(0);
  if (c <= 0.0) throw AnalysisError("fitted fringe offset is not positive");
  const double amp = std::hypot(coef(1), coef(2));

  EmpiricalVisibility out;
  out.value = amp / c;
  if (amp > 0.0) {
    const Eigen::Vector3d grad(-amp / (c * c), coef(1) / (c * amp), coef(2) / (c * amp));
    out.sigma = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  } else {
    out.sigma = std::sqrt(0.5 * (cov(1, 1) + cov(2, 2))) / c;
  }
  return out;
}

EmpiricalVisibility empirical_visibility(const FringeScan& scan, Quantity q) {
  require_full_period(scan);
  if (scan.empirical.empty()) throw AnalysisError("scan has no empirical tallies");
  std::vector<double> phases;
  std::vector<std::uint64_t> hits;
  std::vector<std::uint64_t> trials;
  for (std::size_t k = 0; k < scan.settings.size(); ++k) {
    phases.push_back(scan.swept_phase(k));
    hits.push_back(quantity_count(scan.empirical[k], q));
    trials.push_back(scan.empirical[k].n_trials);
  }
  return empirical_visibility(phases, hits, trials);
}

double correlation(const JointProbabilities& p) {
  return p(1, 1) + p(2, 2) - p(1, 2) - p(2, 1);
}

ChshResult chsh(double phi_s, double phi_s_prime, double phi_a, double phi_a_prime,
                const DensityOperator& source) {
  ChshResult r;
  r.settings = {PhaseSettings{phi_s, phi_a}, PhaseSettings{phi_s, phi_a_prime},
                PhaseSettings{phi_s_prime, phi_a}, PhaseSettings{phi_s_prime, phi_a_prime}};
  for (std::size_t k = 0; k < 4; ++k)
    r.correlations[k] = correlation(circuit_probabilities(source, r.settings[k]));
  r.s_value = r.correlations[0] - r.correlations[1] + r.correlations[2] + r.correlations[3];
  return r;
}

ChshResult chsh(double phi_s, double phi_s_prime, double phi_a, double phi_a_prime) {
  static const DensityOperator ms = optics::source_density(optics::measurement_state_source());
  return chsh(phi_s, phi_s_prime, phi_a, phi_a_prime, ms);
}

ChshResult chsh_canonical(const DensityOperator& source) {
  constexpr double pi = std::numbers::pi;
  return chsh(0.0, pi / 2.0, pi / 4.0, 3.0 * pi / 4.0, source);
}

ChshMaximum chsh_maximize(const DensityOperator& source, std::size_t coarse) {
  if (coarse < 2) throw AnalysisError("CHSH scan needs a grid of at least 2 points");
  const std::size_t n = coarse;
  const double step = kTwoPi / static_cast<double>(n);

  std::vector<double> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      table[i * n + j] = correlation(circuit_probabilities(
          source, {step * static_cast<double>(i), step * static_cast<double>(j)}));
  auto e = [&](std::size_t s, std::size_t a) { return table[s * n + a]; };

  double best = -1.0;
  std::array<std::size_t, 4> arg{};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t sp = 0; sp < n; ++sp)
      for (std::size_t a = 0; a < n; ++a) {
        const double left = e(s, a) + e(sp, a);
        for (std::size_t ap = 0; ap < n; ++ap) {
          const double v = std::abs(left - e(s, ap) + e(sp, ap));
          if (v > best) {
            best = v;
            arg = {s, sp, a, ap};
          }
        }
      }

  ChshMaximum out;
  out.coarse_max = best;

  std::array<double, 4> x{};
  for (std::size_t k = 0; k < 4; ++k) x[k] = step * static_cast<double>(arg[k]);
  auto objective = [&](const std::array<double, 4>& v) {
    return std::abs(chsh(v[0], v[1], v[2], v[3], source).s_value);
  };
  double fx = objective(x);
  for (double h = step / 2.0; h > 1e-10; h /= 2.0) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t k = 0; k < 4; ++k)
        for (double sign : {1.0, -1.0}) {
          auto trial = x;
          trial[k] += sign * h;
          const double ft = objective(trial);
          if (ft > fx) {
            x = trial;
            fx = ft;
            improved = true;
          }
        }
    }
  }
  out.best = chsh(x[0], x[1], x[2], x[3], source);
  out.refined_max = std::max(fx, out.coarse_max);
  return out;
}

double no_signaling_audit(const std::vector<PhaseSettings>& grid, const JointFn& joint) {
  struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double width() const { return hi - lo; }
  };
  // Keyed by the other party's setting; both marginal entries are tracked so
  // unnormalized tables are audited too.
  std::map<double, std::array<Range, 2>> a_given_phi_a;
  std::map<double, std::array<Range, 2>> s_given_phi_s;
  for (const auto& setting : grid) {
    const auto m = measurement::marginals(joint(setting));
    for (std::size_t k = 0; k < 2; ++k) {
      a_given_phi_a[setting.phi_a][k].add(m.a[k]);
      s_given_phi_s[setting.phi_s][k].add(m.s[k]);
    }
  }
  double worst = 0.0;
  for (const auto* groups : {&a_given_phi_a, &s_given_phi_s})
    for (const auto& [key, ranges] : *groups)
      for (const auto& r : ranges) worst = std::max(worst, r.width());
  return worst;
}

linalg::Operator witness_q() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return {std::move(m), linalg::OperatorKind::hermitian};
}

linalg::Operator witness_p() {
  const linalg::Complex i{0.0, 1.0};
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = i;
  m(1, 0) = -i;
  return {std::move(m), linalg::OperatorKind::hermitian};
}

LocalCoherence local_coherence(const DensityOperator& rho) {
  if (rho.dim() != 2) throw AnalysisError("local coherence needs a two-dimensional state");
  return {linalg::expectation(rho, witness_q()), linalg::expectation(rho, witness_p())};
}

DiscriminationReport state_discrimination_report(const std::vector<PhaseSettings>& grid) {
  const auto ms = optics::source_density(optics::measurement_state_source());
  const auto mixture = optics::source_density(optics::mixture_source());
  const auto scan_ms = analytic_scan(ms, grid, SweepAxis::delta);
  const auto scan_mix = analytic_scan(mixture, grid, SweepAxis::delta);

  DiscriminationReport report;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    DiscriminationReport::Row row{grid[k], measurement::marginals(scan_ms.analytic[k]),
                                  measurement::marginals(scan_mix.analytic[k])};
    for (std::size_t i = 0; i < 2; ++i) {
      report.max_marginal_difference =
          std::max({report.max_marginal_difference, std::abs(row.entangled.s[i] - row.mixture.s[i]),
                    std::abs(row.entangled.a[i] - row.mixture.a[i])});
    }
    report.rows.push_back(row);
  }
  report.visibility_entangled = visibility(scan_ms, Quantity::p11);
  report.visibility_mixture = visibility(scan_mix, Quantity::p11);
  report.chsh_max_entangled = chsh_maximize(ms).refined_max;
  report.chsh_max_mixture = chsh_maximize(mixture).refined_max;
  return report;
}

}  // namespace rtm::analysis
