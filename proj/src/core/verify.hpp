#pragma once

#include <optional>
#include <vector>

#include "core/buyer.hpp"
#include "core/model.hpp"

namespace bm {

// One achievable expected outcome together with a generating policy.
struct ClosureEntry {
  Outcome outcome;
  Policy policy;
};

// The induced buy-one menu of a buy-many mechanism: expected outcomes of all
// terminating stationary deterministic policies, Pareto-filtered so that no
// entry is dominated by another entry that is no more expensive.
struct ClosureMenu {
  std::vector<ClosureEntry> entries;
};

ClosureMenu closure(const Menu& menu, int n, double tol = kTol);

struct VerifyResult {
  bool holds = true;
  // Violating policy and its outcome when holds is false.
  std::optional<Policy> witness;
  std::optional<Outcome> witness_outcome;
};

// Buy-many constraint: every achievable outcome must be dominated by a
// single menu entry (or the null lottery) that is no more expensive.
VerifyResult verify_buy_many(const Menu& menu, int n, double tol = kTol);

// All 2^n deterministic bundles priced at the sum of per-item prices.
Menu expand_item_pricing(const std::vector<double>& item_prices);

// Revenue-relevant surrogate for verification: buy-many and buy-one best
// responses agree in utility and payment for every atom of d.
bool valuation_level_check(const Menu& menu, const TypeDistribution& d, double tol = kTol);

}  // namespace bm
