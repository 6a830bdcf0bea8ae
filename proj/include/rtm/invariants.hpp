#pragma once

// Self-check suite behind the `check` command.

#include <cstdint>
#include <string>
#include <vector>

namespace rtm::invariants {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  /// Test hook: perturbs the beam-splitter matrix seen by the element checks.
  double beam_splitter_fault = 0.0;
};

std::vector<InvariantResult> run_suite(const SuiteOptions& options = {});

}  // namespace rtm::invariants
