#pragma once

#include <vector>

#include "core/common.hpp"

namespace bm {

// maximize objective . x  subject to  rows . x <= bounds, x >= 0.
// All bounds must be nonnegative so the slack basis is feasible.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> bounds;
};

struct SimplexSolution {
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

// Dense full-tableau primal simplex. Bland's entering/leaving rule keeps the
// heavily degenerate mechanism-design LPs from cycling.
SimplexSolution solve_max(const LinearProgram& lp);

}  // namespace bm
