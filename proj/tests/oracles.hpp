// Independent oracle routes used only by tests: brute-force enumeration,
// dense Eigen linear algebra, grid search, and barrier Newton solves. None
// of these share code with the implementation paths they verify.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wanopt/instance.hpp"
#include "wanopt/utility.hpp"

namespace oracles {

// ---- cubic ----

/// Largest real eigenvalue of the companion matrix of
/// a3 r^3 + a2 r^2 + a1 r + a0.
double companion_max_real_root(double a3, double a2, double a1, double a0);

/// Bracketing information for cubics whose real/complex classification is
/// ill-conditioned (near-double roots): any maximal real root must lie in
/// [max_unambiguous_real, max_real_part] up to rounding.
struct CompanionBounds {
  double max_unambiguous_real;  ///< largest eigenvalue with imag ~ 0
  double max_real_part;         ///< largest real part over all eigenvalues
};
CompanionBounds companion_root_bounds(double a3, double a2, double a1,
                                      double a0);

/// Maximal root of mu*z*(S+m*z)^2 = beta*(S+m*z) + s via sign-change scan
/// plus bisection on the region S + m*z > 0.
double bisect_breakpoint_root(double mu, double beta, double s, double S,
                              int m);

// ---- spectral norm ----

Eigen::MatrixXd dense_routing(const wanopt::RoutingMatrix& m);
double dense_spectral_norm_sq(const wanopt::RoutingMatrix& m);

// ---- block prox ----

/// Objective of the block rate subproblem:
///   -U(sum x) + (mu/2) ||x - nu||^2, +inf when sum x <= 0.
double block_objective(const std::vector<double>& nu, double mu,
                       const wanopt::UtilityParams& params,
                       const std::vector<double>& x);

/// Projected gradient with Armijo backtracking on the subproblem restricted
/// to a support (free coordinates; all others pinned to zero).
std::pair<double, std::vector<double>> restricted_block_minimum(
    const std::vector<double>& nu, double mu,
    const wanopt::UtilityParams& params, const std::vector<int>& support);

/// Best objective over every nonempty support of size <= max_card.
double best_over_supports(const std::vector<double>& nu, double mu,
                          const wanopt::UtilityParams& params, int max_card);

// ---- y subproblem ----

double phi_value(const std::vector<double>& theta,
                 const std::vector<double>& capacities, double alpha,
                 double rho, double t);

/// Dense grid over [0,1] with step `grid_step`, then golden refinement of
/// the winning cell. Returns the refined minimum value (and t if asked).
double grid_refine_phi_min(const std::vector<double>& theta,
                           const std::vector<double>& capacities, double alpha,
                           double rho, double grid_step = 1e-5,
                           double* t_out = nullptr);

// ---- dense convex solves (barrier Newton) ----

struct SmoothConvexProblem {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  Eigen::MatrixXd constraints;  ///< A x <= b (includes sign constraints)
  Eigen::VectorXd bounds;
};

/// Log-barrier interior point method; x0 must be strictly feasible.
/// Terminates when the duality-gap bound (#constraints / t) falls below
/// gap_tol * max(1, |value|).
Eigen::VectorXd barrier_minimize(const SmoothConvexProblem& problem,
                                 Eigen::VectorXd x0, double gap_tol = 1e-10);

/// Optimal value of  min sum_k -U_k(||x_k||_1)  s.t. R x <= c, x >= 0.
double solve_num_oracle(const wanopt::ProblemInstance& inst);

/// Optimal value of  min sum_k -U_k(||x_k||_1) + alpha t  over
/// { Rx <= t c, [sum_i x_{k,i}/chat_{k,i} <= w_k], 0 <= t <= 1, x >= 0 }.
double solve_relaxed_oracle(const wanopt::ProblemInstance& inst,
                            const std::vector<double>& bottleneck_caps,
                            bool cardinality_rows, double* t_out = nullptr);

// ---- LP ----

/// Exact minimum of cost^T x over {rows x <= rhs, x >= 0} by enumerating
/// every basic feasible point (choose num_vars active constraints). Only
/// viable for tiny systems.
double lp_vertex_enum_min(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& rhs,
                          const std::vector<double>& cost);

}  // namespace oracles
