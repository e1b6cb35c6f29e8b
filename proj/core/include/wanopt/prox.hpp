// Per-flow rate subproblem solvers (x-updates) and the per-link y-updates.
//
// The block subproblem is
//   min_{x_k >= 0, ||x_k||_0 <= w_k}  -U_k(||x_k||_1) + (mu/2) ||x_k - nu_k||^2
// whose solution has the thresholded form x_i = max(0, nu_i + zeta) on its
// support, with mu * zeta = U'_k(sum of the support). zeta is bracketed by a
// breakpoint scan over the sorted nu and pinned by a cubic solve.
#pragma once

#include <span>
#include <vector>

#include "wanopt/utility.hpp"

namespace wanopt {

struct ProxInput {
  std::vector<double> nu;  ///< linearized target, length P_k
  double mu = 0.0;         ///< proximal weight, > 0
  UtilityParams params;
  int cardinality_cap = 0;  ///< w_k, 1 <= w_k <= P_k
};

/// Diagnostics of the breakpoint scan: the shift zeta, how many sorted
/// coordinates the cubic summed over, and the 1-based sorted index i' whose
/// candidate bracketed the root (0 when the scan fell through to the full
/// interval).
struct ProxDetail {
  double zeta = 0.0;
  int kept = 0;
  int breakpoint_index = 0;
};

/// w_k = P_k: no effective cardinality bound.
std::vector<double> prox_no_card(const ProxInput& in,
                                 ProxDetail* detail = nullptr);

/// w_k = 1: single nonzero at the largest nu (lowest index on ties), value
/// is the maximal root of mu*a^3 - mu*nu_i*a^2 - beta*a - s_k = 0.
std::vector<double> prox_card_one(const ProxInput& in,
                                  ProxDetail* detail = nullptr);

/// 1 < w_k < P_k: zero beyond rank w_k of the stable descending sort, the
/// thresholded form on the top w_k, un-permuted back to input order.
std::vector<double> prox_card_w(const ProxInput& in,
                                ProxDetail* detail = nullptr);

/// Dispatch on w_k (= 1 / interior / = P_k).
std::vector<double> prox_block(const ProxInput& in,
                               ProxDetail* detail = nullptr);

/// y-update of the capacity-constrained consensus without the load term:
/// elementwise min(theta_l, c_l). The feasible set has no lower bound.
std::vector<double> project_y_num(std::span<const double> theta,
                                  std::span<const double> capacities);

struct YProxInput {
  std::vector<double> theta;       ///< R x - z / rho, length L
  std::vector<double> capacities;  ///< c, length L
  double alpha = 0.0;
  double rho = 0.0;
};

struct YProxResult {
  double t_star = 0.0;  ///< minimizer of Phi on [0, 1]
  std::vector<double> y;
};

/// y-update with the load term: minimizes
///   Phi(t) = alpha * t + (rho/2) ||y(t) - theta||^2  over t in [0, 1],
/// where y_l(t) clamps theta_l to [0, min(c_l, t c_l)]. Phi is convex; the
/// 1-D search is golden section with parabolic interpolation.
YProxResult solve_y_mopc(const YProxInput& in, double t_tol = 1e-8,
                         int max_evals = 500);

}  // namespace wanopt
