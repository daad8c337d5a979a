#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace bm {

// Parameters of the finite-menu approximation pipeline. delta and the two
// price discounts default exactly to the construction's values; effective
// item count is n for unit-demand menus and 2^n on the meta-item route.
struct CompressionParams {
  double epsilon = 0.0;
  int effective_items = 0;

  double delta() const;        // eps^3 / m^3
  double grid_step() const;    // delta^2
  double keep_discount() const {
    return 1.0 - std::sqrt(epsilon);
  }
  double round_discount() const {
    return 1.0 - std::sqrt(delta());
  }
};

CompressionParams make_compression_params(double epsilon, int effective_items);

// Removes every entry with some marginal coordinate in (0, delta); survivors
// keep their allocation and get the (1 - sqrt(eps)) price discount. Entries
// must convert to marginal form (singleton-plus-empty support).
Menu drop_small(const Menu& menu, const CompressionParams& params, double tol = kTol);

// Floors every marginal coordinate to a multiple of delta^2, applies the
// (1 - sqrt(delta)) discount and collapses duplicates to the minimum price.
Menu grid_round(const Menu& menu, const CompressionParams& params, double tol = kTol);

struct CompressReport {
  double epsilon = 0.0;
  double delta = 0.0;
  int effective_items = 0;
  bool meta = false;
  std::size_t input_entries = 0;
  std::size_t after_drop_entries = 0;
  std::size_t output_entries = 0;
  double size_bound_log2 = 0.0;  // m * log2(1 + 1/delta^2)
  bool size_bound_ok = false;
  double input_revenue = 0.0;   // buy-many revenue of the input menu on d
  double output_revenue = 0.0;  // buy-many revenue of the compressed menu
  double target_factor = 0.0;   // 1 - 4 sqrt(eps)
};

// Unit-demand pipeline: grid_round(drop_small(menu)). Distributions that
// are not all unit-demand are routed through meta_item_compress.
std::pair<Menu, CompressReport> compress(const Menu& menu, const TypeDistribution& d,
                                         double epsilon, double tol = kTol);

// Re-encodes every lottery as a marginal over the 2^n meta-items (one per
// nonempty subset), runs the pipeline with n replaced by 2^n in all derived
// constants, and maps back. n <= 4.
std::pair<Menu, CompressReport> meta_item_compress(const Menu& menu, const TypeDistribution& d,
                                                   double epsilon, double tol = kTol);

}  // namespace bm
