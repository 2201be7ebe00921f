#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace thermo {

struct CheckResult {
  std::string name;
  /// Non-negative deviation from the oracle (or count of failures).
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// Full invariant suite with internal brute-force oracles. Every random
/// choice derives from `seed`.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

}  // namespace thermo
