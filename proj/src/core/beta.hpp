#pragma once

#include <cstdint>
#include <string>

#include "core/common.hpp"

namespace bm {

// Closed-form optimal two-item menu for i.i.d. values with density 2 - 2v on
// [0, 1]. Region constants at their published 4-decimal precision; every
// check carries explicit slack so the rounding cannot flip an outcome.
namespace beta {

inline constexpr double kX0 = 0.0618;     // = y0 by symmetry
inline constexpr double kPStar = 0.5535;  // grand-bundle price
inline constexpr double kAllocBound = 0.147;

enum class Region { Z, A, B, W };

std::string to_string(Region r);

// Region boundary in v2 for a given v1 < x0 (and symmetrically for B).
double a_region_threshold(double v1);

bool in_region_a(double v1, double v2);
bool in_region_b(double v1, double v2);
bool in_region_w(double v1, double v2);

Region classify(double v1, double v2);

struct MenuOutcome {
  Region region = Region::Z;
  double alloc1 = 0.0;
  double alloc2 = 0.0;
  double price = 0.0;
};

// Allocation probabilities and payment of the optimal mechanism at a type.
MenuOutcome outcome(double v1, double v2);

struct VerifyReport {
  double grid_step = 0.0;
  std::size_t checked = 0;
  double min_margin = 0.0;       // min over the grid of p + (1-a)/2 - p*
  double max_alloc = 0.0;        // max a over the grid; must stay < 0.147
  double worst_case_payment = 0.0;  // 0.5 + (1 - 0.147) * 0.5 = 0.9265
  bool holds = false;
};

// Checks, along the A-region price curve, that re-buying strategies (one
// item-1-heavy entry, then the cheapest item-2-sure entry) cost at least
// the bundle price, so a single purchase is always weakly better.
VerifyReport verify_buy_many(double grid_step);

struct RevenueReport {
  double coarse = 0.0;
  double fine = 0.0;
  std::int64_t coarse_points = 0;
  std::int64_t fine_points = 0;
  double difference = 0.0;
};

// Expected payment under the product density (2-2v1)(2-2v2): outer midpoint
// rule over v1 split at the region breakpoints, inner integration in v2
// exact on constant-price pieces and Gauss-Legendre on the B-region piece.
double expected_revenue(std::int64_t quadrature_points);

RevenueReport revenue_convergence(std::int64_t coarse_points, std::int64_t fine_points);

}  // namespace beta

}  // namespace bm
