#pragma once

// Property suite over every module's invariants. Each check is cheap enough
// that the whole suite runs in seconds.

#include <cstdint>
#include <string>
#include <vector>

namespace entforge {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_property_suite(std::uint64_t seed = 0, int workers = 1);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace entforge
