#include "rtm/report.hpp"

#include <cstdio>

namespace rtm::report {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace {

void row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

std::string freq(const measurement::CoincidenceTally& t, analysis::Quantity q) {
  return format_number(static_cast<double>(analysis::quantity_count(t, q)) /
                       static_cast<double>(t.n_trials));
}

}  // namespace

void write_sweep_csv(std::ostream& out, const analysis::FringeScan& scan) {
  using analysis::Quantity;
  scan.validate();
  out << kSweepHeader << '\n';
  for (std::size_t k = 0; k < scan.settings.size(); ++k) {
    const auto& p = scan.analytic[k];
    const auto m = measurement::marginals(p);
    if (scan.empirical.empty()) {
      row(out, {format_number(scan.settings[k].delta()), format_number(p(1, 1)),
                format_number(p(1, 2)), format_number(p(2, 1)), format_number(p(2, 2)),
                format_number(m.s[0]), format_number(m.a[0]), "", "", "", "", "0"});
      continue;
    }
    const auto& t = scan.empirical[k];
    row(out, {format_number(scan.settings[k].delta()), format_number(p(1, 1)),
              format_number(p(1, 2)), format_number(p(2, 1)), format_number(p(2, 2)),
              format_number(m.s[0]), format_number(m.a[0]), freq(t, Quantity::p11),
              freq(t, Quantity::p12), freq(t, Quantity::p21), freq(t, Quantity::p22),
              std::to_string(t.n_trials)});
  }
}

void write_delayed_choice_csv(std::ostream& out, const experiments::DelayedChoiceData& data) {
  using analysis::Quantity;
  out << "phi_s,phi_a,off_emp_marg_s1,on_emp_marg_s1,off_n_trials,on_n_trials\n";
  for (std::size_t k = 0; k < data.settings.size(); ++k)
    row(out, {format_number(data.settings[k].phi_s), format_number(data.settings[k].phi_a),
              freq(data.off[k], Quantity::marg_s1), freq(data.on[k], Quantity::marg_s1),
              std::to_string(data.off[k].n_trials), std::to_string(data.on[k].n_trials)});
}

void write_cat_csv(std::ostream& out, const experiments::CatData& data) {
  out << "subsystem,pop1,pop2,q_exp,p_exp\n";
  row(out, {"S", format_number(data.populations_s[0]), format_number(data.populations_s[1]),
            format_number(data.coherence_s.q), format_number(data.coherence_s.p)});
  row(out, {"A", format_number(data.populations_a[0]), format_number(data.populations_a[1]),
            format_number(data.coherence_a.q), format_number(data.coherence_a.p)});
}

void write_bell_csv(std::ostream& out, const analysis::ChshResult& result) {
  out << "term,phi_s,phi_a,correlation\n";
  static constexpr const char* kTerms[4] = {"E(s,a)", "E(s,a')", "E(s',a)", "E(s',a')"};
  for (std::size_t k = 0; k < 4; ++k)
    row(out, {kTerms[k], format_number(result.settings[k].phi_s),
              format_number(result.settings[k].phi_a), format_number(result.correlations[k])});
  row(out, {"S", "", "", format_number(result.s_value)});
}

void write_result_csv(std::ostream& out, const experiments::ExperimentResult& result) {
  if (result.cat) {
    write_cat_csv(out, *result.cat);
  } else if (result.delayed) {
    write_delayed_choice_csv(out, *result.delayed);
  } else if (result.scan) {
    write_sweep_csv(out, *result.scan);
  }
}

void write_verdicts(std::ostream& out, const std::vector<experiments::Verdict>& verdicts) {
  for (const auto& v : verdicts)
    out << (v.passed ? "PASS " : "FAIL ") << v.name << " measured=" << format_number(v.measured)
        << " expected=" << format_number(v.expected)
        << " tolerance=" << format_number(v.tolerance) << '\n';
}

}  // namespace rtm::report
