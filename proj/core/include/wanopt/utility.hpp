// Per-flow utility, its derivative, and augmented Lagrangian evaluation.
#pragma once

#include <span>

#include "wanopt/instance.hpp"

namespace wanopt {

/// Parameters of the flow utility beta * log(t) - s / t, where t is the
/// flow's total rate. beta = 0 is accepted (pure completion-time utility).
struct UtilityParams {
  double beta = 0.0;
  double flow_size = 0.0;  ///< s, bits
};

/// beta * log(t) - s / t. Strictly increasing and strictly concave on
/// (0, inf). Throws std::domain_error for t <= 0.
double utility_value(const UtilityParams& p, double t);

/// Derivative beta / t + s / t^2: positive, strictly decreasing.
/// Throws std::domain_error for t <= 0.
double utility_grad(const UtilityParams& p, double t);

enum class ProblemKind { kNum, kMopc };

/// L_rho(x, y; z) = sum_k -U_k(||x_k||_1) [+ alpha * max_l y_l / c_l]
///                  + z^T (y - R x) + (rho / 2) ||y - R x||^2.
/// The load term is present for kMopc only. Domain membership (x >= 0 with
/// positive block totals; y <= c, and additionally y >= 0 for kMopc) is a
/// precondition checked here, not an indicator value.
double augmented_lagrangian(const ProblemInstance& inst, const Allocation& x,
                            std::span<const double> y,
                            std::span<const double> z, double rho,
                            ProblemKind kind);

}  // namespace wanopt
