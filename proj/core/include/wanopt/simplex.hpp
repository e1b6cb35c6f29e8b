// Dense tableau simplex for the desk-scale linear minimization oracles.
#pragma once

#include <cstddef>
#include <vector>

namespace wanopt {

/// minimize cost^T x  subject to  rows * x <= rhs, x >= 0.
/// rhs must be nonnegative (the slack basis is then feasible, so no
/// phase-one is needed); every polytope built here has that form.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> rows;  ///< each of length num_vars
  std::vector<double> rhs;
  std::vector<double> cost;
};

struct LpSolution {
  std::vector<double> x;  ///< an optimal vertex
  double objective = 0.0;
  int pivots = 0;
};

/// Dantzig pricing with a Bland's-rule fallback that engages whenever the
/// objective stalls, which guarantees termination on the degenerate
/// polytopes used here. Throws std::runtime_error on an unbounded ray
/// (impossible for the bounded oracles; treated as a solver bug) and on
/// negative rhs.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace wanopt
