#include "core/beta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace bm::beta {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290,
                                            0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

double price_curve(double v) {
  const double d = 4.0 - 5.0 * v;
  return (15.0 * v * v - 20.0 * v + 8.0) / (d * d);
}

double alloc_curve(double v) {
  const double d = 4.0 - 5.0 * v;
  return 2.0 / (d * d);
}

double density_mass_above(double lo) {
  // integral of (2 - 2t) dt over [lo, 1]
  const double width = 1.0 - lo;
  return width * width;
}

template <typename F>
double gauss8(F f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    total += kGlWeights[k] * (f(mid + half * kGlNodes[k]) + f(mid - half * kGlNodes[k]));
  }
  return total * half;
}

// Expected payment within one vertical strip at v1, integrated over v2
// against the density 2 - 2*v2. Constant-price pieces are exact; the
// B-region price curve is handled by Gauss-Legendre.
double strip_payment(double v1) {
  if (v1 < kX0) {
    // A above the threshold, Z below; no B or W for v1 < x0.
    return price_curve(v1) * density_mass_above(a_region_threshold(v1));
  }
  double total = 0.0;
  // W: v2 >= max(y0, p* - v1).
  const double w_lo = std::max(kX0, kPStar - v1);
  if (w_lo < 1.0) total += kPStar * density_mass_above(w_lo);
  // B: v2 in [b_lo, y0) with the symmetric threshold condition on v1.
  double b_lo = -1.0;
  if (v1 >= 0.5) {
    b_lo = 0.0;
  } else if (v1 >= a_region_threshold(kX0)) {
    b_lo = (2.0 - 4.0 * v1) / (3.0 - 5.0 * v1);
  }
  if (b_lo >= 0.0 && b_lo < kX0) {
    total += gauss8([](double v2) { return price_curve(v2) * (2.0 - 2.0 * v2); }, b_lo, kX0);
  }
  return total;
}

}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::Z: return "Z";
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::W: return "W";
  }
  return "?";
}

double a_region_threshold(double v1) {
  return (2.0 - 3.0 * v1) / (4.0 - 5.0 * v1);
}

bool in_region_a(double v1, double v2) {
  return v1 >= 0.0 && v1 < kX0 && v2 >= a_region_threshold(v1) && v2 <= 1.0;
}

bool in_region_b(double v1, double v2) {
  return in_region_a(v2, v1);
}

bool in_region_w(double v1, double v2) {
  return v1 >= kX0 && v2 >= kX0 && v1 <= 1.0 && v2 <= 1.0 && v1 + v2 >= kPStar;
}

Region classify(double v1, double v2) {
  require(v1 >= 0.0 && v1 <= 1.0 && v2 >= 0.0 && v2 <= 1.0,
          "beta menu: types live on the unit square");
  if (in_region_a(v1, v2)) return Region::A;
  if (in_region_b(v1, v2)) return Region::B;
  if (in_region_w(v1, v2)) return Region::W;
  return Region::Z;
}

MenuOutcome outcome(double v1, double v2) {
  MenuOutcome out;
  out.region = classify(v1, v2);
  switch (out.region) {
    case Region::Z:
      break;
    case Region::A:
      out.alloc1 = alloc_curve(v1);
      out.alloc2 = 1.0;
      out.price = price_curve(v1);
      break;
    case Region::B:
      out.alloc1 = 1.0;
      out.alloc2 = alloc_curve(v2);
      out.price = price_curve(v2);
      break;
    case Region::W:
      out.alloc1 = 1.0;
      out.alloc2 = 1.0;
      out.price = kPStar;
      break;
  }
  return out;
}

VerifyReport verify_buy_many(double grid_step) {
  require(grid_step > 0.0 && grid_step <= 1e-3, "beta verify: grid step must be in (0, 1e-3]");
  VerifyReport report;
  report.grid_step = grid_step;
  report.worst_case_payment = 0.5 + (1.0 - kAllocBound) * 0.5;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.max_alloc = 0.0;
  // Walk the A-region price/allocation curve. The adaptive strategy that
  // beats a single purchase, if any, buys an item-2-sure entry (price >= 0.5)
  // and tops up item 1 with probability 1-a; its cost must stay above p*.
  // The B-region curve is the mirror image and needs no separate scan.
  for (double v1 = 0.0; v1 < kX0; v1 += grid_step) {
    const double a = alloc_curve(v1);
    const double p = price_curve(v1);
    const double margin = p + (1.0 - a) * 0.5 - kPStar;
    report.min_margin = std::min(report.min_margin, margin);
    report.max_alloc = std::max(report.max_alloc, a);
    ++report.checked;
  }
  report.holds = report.min_margin > 0.0 && report.max_alloc < kAllocBound &&
                 report.worst_case_payment > kPStar;
  return report;
}

double expected_revenue(std::int64_t quadrature_points) {
  require(quadrature_points >= 10'000, "beta revenue: needs at least 1e4 quadrature points");
  // Outer integral over v1, split at the strip-function breakpoints, with a
  // 2-point Gauss rule per cell; cell budget ~ sqrt of the requested points.
  std::vector<double> breaks = {0.0, kX0, a_region_threshold(kX0), kPStar - kX0, 0.5, 1.0};
  std::sort(breaks.begin(), breaks.end());
  const auto cells_total =
      static_cast<std::int64_t>(std::sqrt(static_cast<double>(quadrature_points)));
  const double gauss_offset = 0.5 / std::sqrt(3.0);

  double total = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b];
    const double hi = breaks[b + 1];
    if (hi - lo < 1e-15) continue;
    const auto cells = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(static_cast<double>(cells_total) * (hi - lo)));
    const double h = (hi - lo) / static_cast<double>(cells);
    for (std::int64_t c = 0; c < cells; ++c) {
      const double mid = lo + (static_cast<double>(c) + 0.5) * h;
      for (const double v1 : {mid - gauss_offset * h, mid + gauss_offset * h}) {
        total += 0.5 * h * strip_payment(v1) * (2.0 - 2.0 * v1);
      }
    }
  }
  return total;
}

RevenueReport revenue_convergence(std::int64_t coarse_points, std::int64_t fine_points) {
  RevenueReport report;
  report.coarse_points = coarse_points;
  report.fine_points = fine_points;
  report.coarse = expected_revenue(coarse_points);
  report.fine = expected_revenue(fine_points);
  report.difference = std::fabs(report.coarse - report.fine);
  return report;
}

}  // namespace bm::beta
