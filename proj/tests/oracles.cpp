#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double companion_max_real_root(double a3, double a2, double a1, double a0) {
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 2) = -a0 / a3;
  companion(1, 2) = -a1 / a3;
  companion(2, 2) = -a2 / a3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion);

  // A double root perturbs into a conjugate pair with imaginary part up to
  // ~sqrt(eps) * scale, so classify by the polynomial residual at the real
  // part rather than by the imaginary part alone.
  const auto residual_ok = [&](double r) {
    const double value = ((a3 * r + a2) * r + a1) * r + a0;
    const double scale = std::max({1.0, std::fabs(a3 * r * r * r),
                                   std::fabs(a2 * r * r), std::fabs(a1 * r),
                                   std::fabs(a0)});
    return std::fabs(value) <= 1e-7 * scale;
  };

  double best = -std::numeric_limits<double>::infinity();
  double least_imag = std::numeric_limits<double>::infinity();
  double least_imag_real = 0.0;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> ev = solver.eigenvalues()[i];
    const double im = std::fabs(ev.imag());
    if (im < least_imag) {
      least_imag = im;
      least_imag_real = ev.real();
    }
    if (im <= 1e-9 * (1.0 + std::fabs(ev.real())) || residual_ok(ev.real())) {
      best = std::max(best, ev.real());
    }
  }
  // A cubic always has a real root; fall back to the most-real eigenvalue.
  if (!std::isfinite(best)) best = least_imag_real;
  return best;
}

CompanionBounds companion_root_bounds(double a3, double a2, double a1,
                                      double a0) {
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 2) = -a0 / a3;
  companion(1, 2) = -a1 / a3;
  companion(2, 2) = -a2 / a3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion);
  CompanionBounds bounds{-std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
  double least_imag = std::numeric_limits<double>::infinity();
  double least_imag_real = 0.0;
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> ev = solver.eigenvalues()[i];
    bounds.max_real_part = std::max(bounds.max_real_part, ev.real());
    const double im = std::fabs(ev.imag());
    if (im < least_imag) {
      least_imag = im;
      least_imag_real = ev.real();
    }
    if (im <= 1e-9 * (1.0 + std::fabs(ev.real()))) {
      bounds.max_unambiguous_real = std::max(bounds.max_unambiguous_real, ev.real());
    }
  }
  if (!std::isfinite(bounds.max_unambiguous_real)) {
    bounds.max_unambiguous_real = least_imag_real;
  }
  return bounds;
}

double bisect_breakpoint_root(double mu, double beta, double s, double S,
                              int m) {
  const double md = static_cast<double>(m);
  const auto g = [&](double z) {
    const double T = S + md * z;
    return mu * z * T * T - beta * T - s;
  };
  // Region of interest: T > 0 and z > 0.
  double lo = std::max(0.0, -S / md) + 1e-300;
  double hi = std::max(lo * 2.0, 1.0);
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("bisection oracle: no bracket");
  }
  if (g(lo) > 0.0) {
    // Root may sit between 0 and lo when S > 0; widen downward.
    lo = 0.0;
  }
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

MatrixXd dense_routing(const wanopt::RoutingMatrix& m) {
  MatrixXd dense = MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()),
                                  static_cast<Eigen::Index>(m.cols()));
  for (std::size_t l = 0; l < m.rows(); ++l) {
    for (std::uint32_t c : m.row_cols(l)) {
      dense(static_cast<Eigen::Index>(l), c) = 1.0;
    }
  }
  return dense;
}

double dense_spectral_norm_sq(const wanopt::RoutingMatrix& m) {
  const Eigen::JacobiSVD<MatrixXd> svd(dense_routing(m));
  const double sigma = svd.singularValues()(0);
  return sigma * sigma;
}

double block_objective(const std::vector<double>& nu, double mu,
                       const wanopt::UtilityParams& params,
                       const std::vector<double>& x) {
  double total = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    total += x[i];
    quad += (x[i] - nu[i]) * (x[i] - nu[i]);
  }
  if (!(total > 0.0)) return std::numeric_limits<double>::infinity();
  return -wanopt::utility_value(params, total) + 0.5 * mu * quad;
}

std::pair<double, std::vector<double>> restricted_block_minimum(
    const std::vector<double>& nu, double mu,
    const wanopt::UtilityParams& params, const std::vector<int>& support) {
  std::vector<double> x(nu.size(), 0.0);
  for (int i : support) x[i] = std::max(nu[i], 0.1);

  const auto value = [&](const std::vector<double>& pt) {
    return block_objective(nu, mu, params, pt);
  };

  double fx = value(x);
  std::vector<double> grad(support.size());
  std::vector<double> trial(nu.size(), 0.0);
  double step = 1.0 / mu;

  for (int iter = 0; iter < 20000; ++iter) {
    double total = 0.0;
    for (int i : support) total += x[i];
    const double slope = -wanopt::utility_grad(params, total);
    double grad_norm_sq = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) {
      const int i = support[j];
      grad[j] = slope + mu * (x[i] - nu[i]);
      // Projected-gradient norm: ignore descent directions blocked at 0.
      if (!(x[i] <= 0.0 && grad[j] > 0.0)) grad_norm_sq += grad[j] * grad[j];
    }
    if (grad_norm_sq <= 1e-24 * std::max(1.0, mu * mu)) break;

    // Armijo backtracking on the projected step.
    double t = step;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::fill(trial.begin(), trial.end(), 0.0);
      double decrease = 0.0;
      for (std::size_t j = 0; j < support.size(); ++j) {
        const int i = support[j];
        trial[i] = std::max(0.0, x[i] - t * grad[j]);
        decrease += (x[i] - trial[i]) * grad[j];
      }
      const double ft = value(trial);
      if (ft <= fx - 1e-4 * decrease && std::isfinite(ft)) {
        x = trial;
        fx = ft;
        moved = true;
        if (t == step) step *= 1.3;  // allow growth when full steps succeed
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return {fx, x};
}

double best_over_supports(const std::vector<double>& nu, double mu,
                          const wanopt::UtilityParams& params, int max_card) {
  const int n = static_cast<int>(nu.size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > max_card) continue;
    std::vector<int> support;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    best = std::min(best, restricted_block_minimum(nu, mu, params, support).first);
  }
  return best;
}

double phi_value(const std::vector<double>& theta,
                 const std::vector<double>& capacities, double alpha,
                 double rho, double t) {
  double quad = 0.0;
  for (std::size_t l = 0; l < theta.size(); ++l) {
    const double upper = std::min(capacities[l], t * capacities[l]);
    const double y = std::clamp(theta[l], 0.0, upper);
    quad += (y - theta[l]) * (y - theta[l]);
  }
  return alpha * t + 0.5 * rho * quad;
}

double grid_refine_phi_min(const std::vector<double>& theta,
                           const std::vector<double>& capacities, double alpha,
                           double rho, double grid_step, double* t_out) {
  const auto phi = [&](double t) {
    return phi_value(theta, capacities, alpha, rho, t);
  };
  double best_t = 0.0;
  double best = phi(0.0);
  const long long cells = static_cast<long long>(std::llround(1.0 / grid_step));
  for (long long i = 1; i <= cells; ++i) {
    const double t = static_cast<double>(i) * grid_step;
    const double v = phi(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  // Golden refinement inside the winning cell's neighborhood.
  double lo = std::max(0.0, best_t - 2.0 * grid_step);
  double hi = std::min(1.0, best_t + 2.0 * grid_step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = phi(c), fd = phi(d);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    if (fc < fd) {
      hi = d; d = c; fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = phi(c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = phi(d);
    }
  }
  const double t_ref = 0.5 * (lo + hi);
  const double refined = std::min(best, phi(t_ref));
  if (t_out != nullptr) *t_out = (refined < best) ? t_ref : best_t;
  return refined;
}

VectorXd barrier_minimize(const SmoothConvexProblem& problem, VectorXd x,
                          double gap_tol) {
  const Eigen::Index num_cons = problem.constraints.rows();
  const Eigen::Index dim = x.size();
  VectorXd slack = problem.bounds - problem.constraints * x;
  if ((slack.array() <= 0.0).any()) {
    throw std::invalid_argument("barrier oracle: start point infeasible");
  }

  double t = 1.0;
  for (int outer = 0; outer < 60; ++outer) {
    // Newton centering.
    for (int inner = 0; inner < 80; ++inner) {
      slack = problem.bounds - problem.constraints * x;
      VectorXd grad = t * problem.gradient(x);
      MatrixXd hess = t * problem.hessian(x);
      for (Eigen::Index i = 0; i < num_cons; ++i) {
        const VectorXd row = problem.constraints.row(i).transpose();
        grad += row / slack(i);
        hess += (row * row.transpose()) / (slack(i) * slack(i));
      }
      const VectorXd dx = hess.ldlt().solve(-grad);
      const double decrement_sq = -grad.dot(dx);
      if (!(decrement_sq > 1e-18)) break;

      // Stay strictly feasible, then backtrack on the barrier value.
      const VectorXd cons_dx = problem.constraints * dx;
      double step = 1.0;
      for (Eigen::Index i = 0; i < num_cons; ++i) {
        if (cons_dx(i) > 0.0) {
          step = std::min(step, 0.99 * slack(i) / cons_dx(i));
        }
      }
      const auto barrier_value = [&](const VectorXd& pt) {
        const VectorXd s = problem.bounds - problem.constraints * pt;
        if ((s.array() <= 0.0).any()) {
          return std::numeric_limits<double>::infinity();
        }
        return t * problem.value(pt) - s.array().log().sum();
      };
      const double f0 = barrier_value(x);
      for (int bt = 0; bt < 60; ++bt) {
        const VectorXd cand = x + step * dx;
        if (barrier_value(cand) <= f0 - 1e-4 * step * decrement_sq) {
          x = cand;
          break;
        }
        step *= 0.5;
      }
      if (decrement_sq < 1e-16) break;
    }
    const double gap = static_cast<double>(num_cons) / t;
    if (gap <= gap_tol * std::max(1.0, std::fabs(problem.value(x)))) break;
    t *= 10.0;
  }
  return x;
}

namespace {

// Shared pieces of the utility objective over flow blocks.
struct BlockUtility {
  const wanopt::ProblemInstance* inst;
  bool has_t = false;  // last coordinate is the auxiliary load variable

  double value(const VectorXd& x) const {
    double v = has_t ? inst->alpha * x(x.size() - 1) : 0.0;
    for (std::size_t k = 0; k < inst->num_flows; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < inst->paths_per_flow[k]; ++i) {
        total += x(static_cast<Eigen::Index>(inst->block_offset[k] + i));
      }
      v -= wanopt::utility_value({inst->beta, inst->flow_sizes[k]}, total);
    }
    return v;
  }
  VectorXd gradient(const VectorXd& x) const {
    VectorXd g = VectorXd::Zero(x.size());
    if (has_t) g(x.size() - 1) = inst->alpha;
    for (std::size_t k = 0; k < inst->num_flows; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < inst->paths_per_flow[k]; ++i) {
        total += x(static_cast<Eigen::Index>(inst->block_offset[k] + i));
      }
      const double slope =
          -wanopt::utility_grad({inst->beta, inst->flow_sizes[k]}, total);
      for (std::size_t i = 0; i < inst->paths_per_flow[k]; ++i) {
        g(static_cast<Eigen::Index>(inst->block_offset[k] + i)) = slope;
      }
    }
    return g;
  }
  MatrixXd hessian(const VectorXd& x) const {
    MatrixXd h = MatrixXd::Zero(x.size(), x.size());
    for (std::size_t k = 0; k < inst->num_flows; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < inst->paths_per_flow[k]; ++i) {
        total += x(static_cast<Eigen::Index>(inst->block_offset[k] + i));
      }
      // -U'' = beta/T^2 + 2 s/T^3 > 0: convex with block rank-one curvature.
      const double curv = inst->beta / (total * total) +
                          2.0 * inst->flow_sizes[k] / (total * total * total);
      for (std::size_t i = 0; i < inst->paths_per_flow[k]; ++i) {
        for (std::size_t j = 0; j < inst->paths_per_flow[k]; ++j) {
          h(static_cast<Eigen::Index>(inst->block_offset[k] + i),
            static_cast<Eigen::Index>(inst->block_offset[k] + j)) += curv;
        }
      }
    }
    return h;
  }
};

}  // namespace

double solve_num_oracle(const wanopt::ProblemInstance& inst) {
  const Eigen::Index dim = static_cast<Eigen::Index>(inst.total_paths);
  const Eigen::Index rows = static_cast<Eigen::Index>(inst.num_links) + dim;

  BlockUtility util{&inst, false};
  SmoothConvexProblem problem;
  problem.value = [util](const VectorXd& x) { return util.value(x); };
  problem.gradient = [util](const VectorXd& x) { return util.gradient(x); };
  problem.hessian = [util](const VectorXd& x) { return util.hessian(x); };
  problem.constraints = MatrixXd::Zero(rows, dim);
  problem.bounds = VectorXd::Zero(rows);
  const MatrixXd dense = dense_routing(inst.routing);
  problem.constraints.topRows(static_cast<Eigen::Index>(inst.num_links)) = dense;
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    problem.bounds(static_cast<Eigen::Index>(l)) = inst.capacities[l];
  }
  problem.constraints.bottomRows(dim) = -MatrixXd::Identity(dim, dim);

  const double min_cap =
      *std::min_element(inst.capacities.begin(), inst.capacities.end());
  VectorXd x0 = VectorXd::Constant(
      dim, min_cap / (4.0 * static_cast<double>(inst.total_paths)));
  const VectorXd x_opt = barrier_minimize(problem, x0);
  return problem.value(x_opt);
}

double solve_relaxed_oracle(const wanopt::ProblemInstance& inst,
                            const std::vector<double>& bottleneck_caps,
                            bool cardinality_rows, double* t_out) {
  const Eigen::Index num_paths = static_cast<Eigen::Index>(inst.total_paths);
  const Eigen::Index dim = num_paths + 1;
  const Eigen::Index t_col = num_paths;
  const Eigen::Index card_rows =
      cardinality_rows ? static_cast<Eigen::Index>(inst.num_flows) : 0;
  const Eigen::Index rows =
      static_cast<Eigen::Index>(inst.num_links) + card_rows + 1 + dim;

  BlockUtility util{&inst, true};
  SmoothConvexProblem problem;
  problem.value = [util](const VectorXd& x) { return util.value(x); };
  problem.gradient = [util](const VectorXd& x) { return util.gradient(x); };
  problem.hessian = [util](const VectorXd& x) { return util.hessian(x); };
  problem.constraints = MatrixXd::Zero(rows, dim);
  problem.bounds = VectorXd::Zero(rows);

  Eigen::Index row = 0;
  const MatrixXd dense = dense_routing(inst.routing);
  for (std::size_t l = 0; l < inst.num_links; ++l, ++row) {
    problem.constraints.block(row, 0, 1, num_paths) = dense.row(l);
    problem.constraints(row, t_col) = -inst.capacities[l];
  }
  if (cardinality_rows) {
    for (std::size_t k = 0; k < inst.num_flows; ++k, ++row) {
      for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
        const std::size_t idx = inst.block_offset[k] + i;
        problem.constraints(row, static_cast<Eigen::Index>(idx)) =
            1.0 / bottleneck_caps[idx];
      }
      problem.bounds(row) = static_cast<double>(inst.cardinality_caps[k]);
    }
  }
  problem.constraints(row, t_col) = 1.0;
  problem.bounds(row) = 1.0;
  ++row;
  problem.constraints.bottomRows(dim) = -MatrixXd::Identity(dim, dim);

  double min_chat = bottleneck_caps[0];
  for (double c : bottleneck_caps) min_chat = std::min(min_chat, c);
  VectorXd x0 = VectorXd::Constant(
      dim, 1e-4 * min_chat / static_cast<double>(inst.total_paths));
  x0(t_col) = 0.5;

  const VectorXd x_opt = barrier_minimize(problem, x0);
  if (t_out != nullptr) *t_out = x_opt(t_col);
  return problem.value(x_opt);
}

double lp_vertex_enum_min(const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& rhs,
                          const std::vector<double>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(rows.size());
  const int total = m + n;  // rows plus x_i >= 0 facets

  MatrixXd all = MatrixXd::Zero(total, n);
  VectorXd all_b = VectorXd::Zero(total);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) all(i, j) = rows[i][j];
    all_b(i) = rhs[i];
  }
  for (int j = 0; j < n; ++j) all(m + j, j) = -1.0;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  const std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == n) {
      MatrixXd active(n, n);
      VectorXd active_b(n);
      for (int j = 0; j < n; ++j) {
        active.row(j) = all.row(pick[j]);
        active_b(j) = all_b(pick[j]);
      }
      const Eigen::FullPivLU<MatrixXd> lu(active);
      if (!lu.isInvertible()) return;
      const VectorXd x = lu.solve(active_b);
      const VectorXd slack = all_b - all * x;
      if ((slack.array() >= -1e-8 * (1.0 + all_b.array().abs())).all()) {
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += cost[j] * x(j);
        best = std::min(best, v);
      }
      return;
    }
    for (int i = start; i <= total - (n - depth); ++i) {
      pick[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  if (!std::isfinite(best)) {
    throw std::runtime_error("vertex enumeration: no feasible vertex");
  }
  return best;
}

}  // namespace oracles
