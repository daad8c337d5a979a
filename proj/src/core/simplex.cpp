#include "core/simplex.hpp"

#include <cmath>
#include <limits>

namespace bm {

namespace {
constexpr double kCostEps = 1e-9;
// Small pivots amplify rounding catastrophically in a dense tableau; rows
// with coefficients below this are never chosen.
constexpr double kPivotEps = 1e-8;
}  // namespace

SimplexSolution solve_max(const LinearProgram& lp) {
  const std::size_t m = lp.rows.size();
  const std::size_t nvars = lp.objective.size();
  require(lp.bounds.size() == m, "simplex: bounds size mismatch");
  for (const auto& row : lp.rows) {
    require(row.size() == nvars, "simplex: row size mismatch");
  }
  for (double b : lp.bounds) {
    require(b >= 0.0, "simplex: bounds must be nonnegative (slack basis start)");
  }
  require_capacity(m * (nvars + m + 1) <= 300'000'000, "simplex: tableau too large");

  const std::size_t width = nvars + m + 1;  // structural + slack + rhs
  std::vector<std::vector<double>> tab(m, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < nvars; ++j) tab[i][j] = lp.rows[i][j];
    tab[i][nvars + i] = 1.0;
    tab[i][width - 1] = lp.bounds[i];
  }
  std::vector<double> cost(width, 0.0);  // reduced costs; minimize -objective
  for (std::size_t j = 0; j < nvars; ++j) cost[j] = -lp.objective[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = nvars + i;

  SimplexSolution sol;
  const int max_iterations = 2'000'000;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Bland: lowest-index improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (cost[j] < -kCostEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) {
      sol.iterations = iter;
      sol.x.assign(nvars, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < nvars) sol.x[basis[i]] = tab[i][width - 1];
      }
      sol.objective = cost[width - 1];
      return sol;
    }
    // Ratio test; ties leave the lowest basis index (Bland).
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] > kPivotEps) {
        const double ratio = tab[i][width - 1] / tab[i][enter];
        if (ratio < best_ratio - kPivotEps ||
            (ratio < best_ratio + kPivotEps && (leave == m || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    require(leave != m, "simplex: objective is unbounded");
    const double pivot = tab[leave][enter];
    for (std::size_t j = 0; j < width; ++j) tab[leave][j] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0.0) continue;
      const double factor = tab[i][enter];
      for (std::size_t j = 0; j < width; ++j) tab[i][j] -= factor * tab[leave][j];
    }
    if (cost[enter] != 0.0) {
      const double factor = cost[enter];
      for (std::size_t j = 0; j < width; ++j) cost[j] -= factor * tab[leave][j];
    }
    basis[leave] = enter;
  }
  throw validation_error("simplex: iteration limit reached");
}

}  // namespace bm
