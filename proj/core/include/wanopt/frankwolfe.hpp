// Conditional-gradient baseline on the linear relaxation of the cardinality
// constraints, plus the top-w projection used by the projected variants.
#pragma once

#include <span>

#include "wanopt/instance.hpp"
#include "wanopt/report.hpp"

namespace wanopt {

/// Instance augmented with per-path bottleneck capacities; the relaxed
/// feasible set is
///   { Rx <= t c,  sum_i x_{k,i} / chat_{k,i} <= w_k,  x >= 0,  0 <= t <= 1 }.
struct RelaxedInstance {
  ProblemInstance base;
  std::vector<double> bottleneck_caps;  ///< chat, indexed by global path
};

RelaxedInstance build_relaxed(const ProblemInstance& inst);

struct FwOptions {
  int max_iters = 20000;
  /// Stop when the duality gap <= gap_rel_tol * max(1, |objective|).
  double gap_rel_tol = 1e-6;
  /// Exact line search along the vertex direction; false uses the
  /// diminishing 2/(m+2) rule. Both are clipped so no flow's total rate
  /// falls below its positivity floor.
  bool line_search = true;
  /// Include the relaxed cardinality rows; false solves the plain convex
  /// problem on the same polytope without them.
  bool cardinality_rows = true;
};

struct FwPoint {
  Allocation x;
  double t = 0.0;
};

/// Linear minimization oracle: a vertex of the relaxed polytope minimizing
/// grad_x^T x + grad_t * t, found by the dense simplex.
FwPoint lmo(const RelaxedInstance& relaxed, std::span<const double> grad_x,
            double grad_t, bool cardinality_rows = true);

/// Frank-Wolfe on  min sum_k -U_k(||x_k||_1) + alpha t  over the relaxed
/// polytope. The trace's dual column carries the duality gap.
SolveReport fw_solve(const RelaxedInstance& relaxed, const FwOptions& opts = {});

/// Per flow, keeps the w_k largest coordinates (stable: ties by lowest
/// index) and zeroes the rest; kept values are unchanged.
Allocation project_cardinality(const ProblemInstance& inst, const Allocation& x);
Allocation project_cardinality(const ProblemInstance& inst, const Allocation& x,
                               const std::vector<int>& caps);

}  // namespace wanopt
