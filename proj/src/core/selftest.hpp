#pragma once

#include <string>
#include <vector>

namespace bm {

struct SelfTestResult {
  int checks = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Compact oracle-equivalence battery: buy-many DP against exhaustive
// stationary-policy enumeration, dominance sanity, buy-many verification of
// item pricings, and LP cross-checks against posted pricing optima.
SelfTestResult run_selftest(std::uint64_t seed = 20240417);

}  // namespace bm
