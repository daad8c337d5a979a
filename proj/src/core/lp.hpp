#pragma once

#include <vector>

#include "core/model.hpp"
#include "core/pricing.hpp"

namespace bm {

struct OptBuyOneResult {
  Menu menu;                          // deduplicated designated entries
  double revenue = 0.0;               // LP objective
  std::vector<int> designated_entry;  // per atom, index into menu (-1 = null)
  std::vector<double> prices;         // per atom, LP price variable
  int lp_variables = 0;
  int lp_constraints = 0;
  int simplex_iterations = 0;
  const char* arithmetic = "double";  // tolerance-based pivoting, not exact rational
};

// Exact optimal buy-one mechanism for a finite type distribution, via the
// incentive-compatibility LP over all 2^n set-indexed allocation variables
// per atom. For all-unit-demand distributions the emitted entries are
// canonicalized to singleton support (each designated draw replaced by the
// buying atom's best item, which preserves its value and every IC/IR
// constraint), so the menu converts to marginal form.
OptBuyOneResult opt_buy_one(const TypeDistribution& d, double tol = kTol);

// Best posted grand-bundle price for single-parameter distributions (every
// atom values all nonempty sets equally). check_structure=false skips the
// structural test when the caller asserts it.
PostedPrice opt_single_parameter(const TypeDistribution& d, bool check_structure = true,
                                 double tol = kTol);

}  // namespace bm
