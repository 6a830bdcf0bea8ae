#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtm/analysis.hpp"
#include "rtm/experiments.hpp"
#include "rtm/invariants.hpp"
#include "rtm/optics.hpp"
#include "rtm/report.hpp"

namespace py = pybind11;
using namespace rtm;

namespace {

using Rows = std::vector<std::vector<std::complex<double>>>;

Rows to_rows(const linalg::Matrix& m) {
  Rows out(m.rows(), std::vector<std::complex<double>>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

linalg::Matrix from_rows(const Rows& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  linalg::Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw linalg::LinalgError("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

optics::SourceKind source_kind(const std::string& tag, std::complex<double> amp1,
                               std::complex<double> amp2) {
  optics::SourceKind k;
  if (tag == "entangled")
    k.tag = optics::SourceTag::entangled;
  else if (tag == "product")
    k.tag = optics::SourceTag::product;
  else if (tag == "mixture")
    k.tag = optics::SourceTag::mixture;
  else
    throw py::value_error("unknown source '" + tag + "'");
  k.amp1 = amp1;
  k.amp2 = amp2;
  return k;
}

const std::complex<double> kHalf{1.0 / std::numbers::sqrt2, 0.0};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-photon interferometry simulator (C++ core)";

  py::register_exception<linalg::LinalgError>(m, "LinalgError", PyExc_ValueError);
  py::register_exception<experiments::SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<analysis::AnalysisError>(m, "AnalysisError", PyExc_ValueError);
  py::register_exception<measurement::MeasurementError>(m, "MeasurementError", PyExc_ValueError);

  m.def("source_density",
        [](const std::string& tag, std::complex<double> a1, std::complex<double> a2) {
          return to_rows(optics::source_density(source_kind(tag, a1, a2)).mat());
        },
        py::arg("source") = "entangled", py::arg("amp1") = kHalf, py::arg("amp2") = kHalf,
        "Density matrix of a source, basis |s1 a1>, |s1 a2>, |s2 a1>, |s2 a2>.");

  m.def("circuit_unitary",
        [](double phi_s, double phi_a) { return to_rows(optics::circuit_unitary({phi_s, phi_a}).mat()); },
        py::arg("phi_s"), py::arg("phi_a"));

  m.def("beam_splitter", [] { return to_rows(optics::beam_splitter().mat()); });

  m.def("joint_probabilities",
        [](double phi_s, double phi_a, const std::string& tag, std::complex<double> a1,
           std::complex<double> a2) {
          const auto rho = optics::source_density(source_kind(tag, a1, a2));
          return analysis::circuit_probabilities(rho, {phi_s, phi_a}).table();
        },
        py::arg("phi_s"), py::arg("phi_a"), py::arg("source") = "entangled",
        py::arg("amp1") = kHalf, py::arg("amp2") = kHalf,
        "Detector joint probabilities p[i][j] after the interferometer (0-based indices).");

  m.def("marginals",
        [](const measurement::JointProbabilities::Table& t) {
          const auto mg = measurement::marginals(measurement::JointProbabilities(t));
          return py::make_tuple(mg.s, mg.a);
        },
        py::arg("p"));

  m.def("coincidence_law",
        [](double delta, const std::string& pairing) {
          if (pairing != "same" && pairing != "opposite")
            throw py::value_error("pairing must be 'same' or 'opposite'");
          return analysis::coincidence_law(delta, pairing == "same" ? analysis::Pairing::same
                                                                    : analysis::Pairing::opposite);
        },
        py::arg("delta_phi"), py::arg("pairing") = "same");

  m.def("partial_trace",
        [](const Rows& rho, std::size_t keep) {
          const linalg::DensityOperator d(from_rows(rho), linalg::Dims{2, 2});
          return to_rows(linalg::partial_trace(d, keep).mat());
        },
        py::arg("rho"), py::arg("keep"), "Reduced state of a two-qubit density matrix.");

  m.def("local_coherence",
        [](const Rows& rho) {
          const auto c = analysis::local_coherence(linalg::DensityOperator(from_rows(rho)));
          return py::make_tuple(c.q, c.p);
        },
        py::arg("rho"));

  m.def("chsh",
        [](double s, double sp, double a, double ap, const std::string& tag) {
          const auto rho = optics::source_density(source_kind(tag, kHalf, kHalf));
          const auto r = analysis::chsh(s, sp, a, ap, rho);
          return py::make_tuple(r.correlations, r.s_value);
        },
        py::arg("phi_s"), py::arg("phi_s_prime"), py::arg("phi_a"), py::arg("phi_a_prime"),
        py::arg("source") = "entangled", "Returns (correlations, S).");

  m.def("sample_events",
        [](const measurement::JointProbabilities::Table& t, std::uint64_t n, std::uint64_t seed) {
          std::vector<std::pair<int, int>> out;
          for (const auto& e : measurement::sample_events(measurement::JointProbabilities(t), n, seed))
            out.emplace_back(e.d_s, e.d_a);
          return out;
        },
        py::arg("p"), py::arg("n"), py::arg("seed"), "Detector pairs (d_s, d_a), labels 1 and 2.");

  m.def("run_preset",
        [](const std::string& name, std::uint64_t n_trials, std::uint64_t seed) {
          const auto preset = experiments::parse_preset(name);
          if (!preset) throw py::value_error("unknown preset '" + name + "'");
          auto spec = experiments::default_spec(*preset);
          if (n_trials) spec.n_trials = n_trials;
          spec.seed = seed;
          const auto result = experiments::run(spec);
          py::list verdicts;
          for (const auto& v : result.verdicts) {
            py::dict d;
            d["name"] = v.name;
            d["passed"] = v.passed;
            d["measured"] = v.measured;
            d["expected"] = v.expected;
            d["tolerance"] = v.tolerance;
            verdicts.append(d);
          }
          std::ostringstream csv;
          report::write_result_csv(csv, result);
          py::dict out;
          out["verdicts"] = verdicts;
          out["passed"] = result.all_passed();
          out["csv"] = csv.str();
          out["event_digest"] = result.event_digest;
          return out;
        },
        py::arg("preset"), py::arg("n_trials") = 0, py::arg("seed") = 1,
        "Runs a preset with default settings; n_trials = 0 keeps the preset default.");

  m.def("check", [] {
    py::list out;
    for (const auto& r : invariants::run_suite()) out.append(py::make_tuple(r.name, r.passed, r.detail));
    return out;
  });
}
