#pragma once

#include <limits>
#include <vector>

#include "core/buyer.hpp"
#include "core/model.hpp"

namespace bm {

// Expected payment over the type distribution under the given semantics,
// with the buyer engine's tie rules.
double revenue(const Menu& menu, const TypeDistribution& d, Semantics semantics, double tol = kTol);

// Item pricing induced by a menu: q_i = min over entries of price / Pr[i in
// draw]; +infinity for items never allocated with positive probability.
std::vector<double> q_vector(const Menu& menu, int n);

// Distribution over the scaling factor alpha used by scaled item pricings.
struct AlphaDistribution {
  // Explicit support (alpha, weight); weights sum to 1.
  std::vector<std::pair<double, double>> points;

  static AlphaDistribution fixed(double alpha);
  // Density proportional to 1/alpha on [lo, hi] as a log-spaced midpoint
  // grid; the standard construction for scaled pricings.
  static AlphaDistribution log_uniform(double lo, double hi, int points = 256);
  static AlphaDistribution default_for(int n) { return log_uniform(1.0 / (2.0 * n), 1.0); }
};

// E_alpha[ revenue(expand_item_pricing(alpha * q), d, buy-many) ]. Items
// with infinite q are excluded from every bundle.
double scaled_pricing_revenue(const std::vector<double>& q, const TypeDistribution& d,
                              const AlphaDistribution& alpha, double tol = kTol);

// Buyer's payment under an item pricing: best subset at summed prices,
// ties seller-favorable. Equivalent to the expanded menu's buy-one (and
// buy-many) best response but without materializing 2^n entries.
double item_pricing_payment(const Valuation& v, const std::vector<double>& q, double tol = kTol);
double item_pricing_revenue(const std::vector<double>& q, const TypeDistribution& d, double tol = kTol);

// Bundle mask the buyer picks under an item pricing (highest price among
// utility ties, then the lowest mask).
std::uint32_t item_pricing_choice(const Valuation& v, const std::vector<double>& q,
                                  double tol = kTol);

struct PostedPrice {
  double price = 0.0;
  double revenue = 0.0;
};

// Optimal posted price for the grand bundle (candidates are the atom values
// of the full set; ties resolved to the lower price).
PostedPrice best_bundle_price(const TypeDistribution& d, double tol = kTol);
// Optimal posted price selling only item i.
PostedPrice best_single_item_price(const TypeDistribution& d, int item, double tol = kTol);

struct ItemPricingSearch {
  std::vector<double> prices;
  double revenue = 0.0;
  bool exhaustive = false;  // false = coordinate-descent heuristic
};

// Grid search over the product of per-item atom-value candidates for
// n <= 3; coordinate descent with restarts beyond that (heuristic).
ItemPricingSearch best_item_pricing(const TypeDistribution& d, std::uint64_t seed = 1,
                                    double tol = kTol);

}  // namespace bm
