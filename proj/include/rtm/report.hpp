#pragma once

// Text and CSV serialization of scans, verdicts and Bell results. Numbers are
// printed with 15 significant digits so reruns diff byte-for-byte.

#include <ostream>
#include <string>
#include <vector>

#include "rtm/experiments.hpp"

namespace rtm::report {

std::string format_number(double v);

inline constexpr const char* kSweepHeader =
    "delta_phi,p11,p12,p21,p22,marg_s1,marg_a1,emp_p11,emp_p12,emp_p21,emp_p22,n_trials";

void write_sweep_csv(std::ostream& out, const analysis::FringeScan& scan);
void write_delayed_choice_csv(std::ostream& out, const experiments::DelayedChoiceData& data);
void write_cat_csv(std::ostream& out, const experiments::CatData& data);
void write_bell_csv(std::ostream& out, const analysis::ChshResult& result);

/// Writes whichever table the preset produced.
void write_result_csv(std::ostream& out, const experiments::ExperimentResult& result);

/// One "PASS|FAIL name measured=.. expected=.. tolerance=.." line per verdict.
void write_verdicts(std::ostream& out, const std::vector<experiments::Verdict>& verdicts);

}  // namespace rtm::report
