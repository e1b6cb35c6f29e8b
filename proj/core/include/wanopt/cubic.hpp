// Maximal-real-root extraction for the single-variable cubics that arise in
// the per-flow rate subproblems.
#pragma once

namespace wanopt {

/// a3*r^3 + a2*r^2 + a1*r + a0, with a3 != 0.
struct Cubic {
  double a3 = 0.0;
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double eval(double r) const { return ((a3 * r + a2) * r + a1) * r + a0; }
  double deriv(double r) const { return (3.0 * a3 * r + 2.0 * a2) * r + a1; }

  /// Magnitude of the largest monomial at r, floored at 1. Used to express
  /// the residual bound |eval(r)| <= tol * term_scale(r).
  double term_scale(double r) const;
};

/// Largest real root of a cubic. Every cubic with a3 != 0 has at least one
/// real root. Closed-form (Cardano / trigonometric) evaluation followed by
/// Newton polish so that |eval(r)| <= 1e-9 * term_scale(r).
/// Throws std::invalid_argument when a3 vanishes relative to the other
/// coefficients.
double max_real_root(const Cubic& c);

/// Solves mu*z*(S + m*z)^2 = beta*(S + m*z) + s_k for the largest real z,
/// where S = partial_sum_nu and m is the number of kept coordinates.
/// This is the stationarity equation of the block rate subproblem restricted
/// to its m active coordinates; the returned root always satisfies
/// S + m*z > 0 (throws std::runtime_error otherwise, which would indicate a
/// solver bug upstream).
double solve_breakpoint_cubic(double mu, double beta, double s_k,
                              double partial_sum_nu, int m);

}  // namespace wanopt
