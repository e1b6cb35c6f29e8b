#include "wanopt/admm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wanopt/prox.hpp"

namespace wanopt {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double min_capacity(const ProblemInstance& inst) {
  return *std::min_element(inst.capacities.begin(), inst.capacities.end());
}

void check_options(const SolveOptions& opts) {
  if (!(opts.rho0 > 0.0)) throw std::invalid_argument("options: rho0 must be positive");
  if (!(opts.mu_factor > 1.0)) throw std::invalid_argument("options: mu_factor must exceed 1");
  if (!(opts.gamma > 0.0 && opts.gamma < 2.0)) {
    throw std::invalid_argument("options: gamma must lie in (0, 2)");
  }
  if (opts.max_iters < 1) throw std::invalid_argument("options: max_iters must be >= 1");
  if (!(opts.eps_abs > 0.0) || !(opts.eps_rel > 0.0) || !(opts.eps_tol1 > 0.0) ||
      !(opts.eps_tol2 > 0.0)) {
    throw std::invalid_argument("options: tolerances must be positive");
  }
  if (!(opts.divergence_factor > 1.0)) {
    throw std::invalid_argument("options: divergence_factor must exceed 1");
  }
}

double problem_objective(const ProblemInstance& inst, const Allocation& x,
                         ProblemKind kind) {
  double value = 0.0;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double total = 0.0;
    for (double v : inst.flow_block(x, k)) total += v;
    value -= utility_value({inst.beta, inst.flow_sizes[k]}, total);
  }
  if (kind == ProblemKind::kMopc) {
    double load = 0.0;
    for (std::size_t l = 0; l < inst.num_links; ++l) {
      load = std::max(load,
                      inst.routing.row_dot(l, x.rates) / inst.capacities[l]);
    }
    value += inst.alpha * load;
  }
  return value;
}

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  std::size_t rank = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      tau = t;
      rank = i + 1;
    }
  }
  if (rank == 0) tau = (cum - 1.0) / static_cast<double>(u.size());
  for (double& x : v) x = std::max(0.0, x - tau);
}

// Distance from -z to the subdifferential of the load term plus the normal
// cone of the y-box at y: min ||g + n + z|| over g in alpha*conv{e_l/c_l,
// l in argmax y/c} and n in N(y). `lower_bounded` distinguishes the [0, c]
// box from the upper-only set.
double stationarity_y_residual(const ProblemInstance& inst,
                               std::span<const double> y,
                               std::span<const double> z, double alpha,
                               bool lower_bounded) {
  const std::size_t num_links = inst.num_links;
  const double bound_tol = 1e-9;

  const auto cone_reduced_sq = [&](std::size_t l, double v) {
    const double cap = inst.capacities[l];
    const bool at_upper = y[l] >= cap * (1.0 - bound_tol);
    const bool at_lower = lower_bounded && y[l] <= cap * bound_tol;
    if (at_upper && v <= 0.0) return 0.0;
    if (at_lower && v >= 0.0) return 0.0;
    return v * v;
  };

  if (alpha == 0.0) {
    double acc = 0.0;
    for (std::size_t l = 0; l < num_links; ++l) acc += cone_reduced_sq(l, z[l]);
    return std::sqrt(acc);
  }

  double max_ratio = lower_bounded ? 0.0 : -1e300;
  for (std::size_t l = 0; l < num_links; ++l) {
    max_ratio = std::max(max_ratio, y[l] / inst.capacities[l]);
  }
  std::vector<std::size_t> active;
  for (std::size_t l = 0; l < num_links; ++l) {
    if (y[l] / inst.capacities[l] >=
        max_ratio - 1e-9 * std::max(1.0, std::fabs(max_ratio))) {
      active.push_back(l);
    }
  }

  // Minimize over the simplex weights of the active links by projected
  // gradient; the problem is a small separable convex QP.
  std::vector<double> lambda(active.size(),
                             1.0 / static_cast<double>(active.size()));
  double lip = 0.0;
  for (std::size_t a : active) {
    const double g = alpha / inst.capacities[a];
    lip = std::max(lip, 2.0 * g * g);
  }
  const double step = (lip > 0.0) ? 1.0 / lip : 1.0;

  const auto objective = [&](const std::vector<double>& lam) {
    double acc = 0.0;
    std::size_t pos = 0;
    for (std::size_t l = 0; l < num_links; ++l) {
      double v = z[l];
      if (pos < active.size() && active[pos] == l) {
        v += alpha * lam[pos] / inst.capacities[l];
        ++pos;
      }
      acc += cone_reduced_sq(l, v);
    }
    return acc;
  };

  std::vector<double> grad(active.size());
  for (int it = 0; it < 300; ++it) {
    for (std::size_t i = 0; i < active.size(); ++i) {
      const std::size_t l = active[i];
      const double cap = inst.capacities[l];
      const double v = z[l] + alpha * lambda[i] / cap;
      const bool at_upper = y[l] >= cap * (1.0 - bound_tol);
      const bool at_lower = lower_bounded && y[l] <= cap * bound_tol;
      double dv = 2.0 * v;
      if (at_upper && v <= 0.0) dv = 0.0;
      if (at_lower && v >= 0.0) dv = 0.0;
      grad[i] = dv * alpha / cap;
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      lambda[i] -= step * grad[i];
    }
    project_simplex(lambda);
  }
  return std::sqrt(objective(lambda));
}

// KKT residual of the rate vector against the final multiplier: distance
// from R^T z - grad f(x) to the normal cone of the cardinality-capped
// nonnegative set at x.
double stationarity_x_residual(const ProblemInstance& inst,
                               const Allocation& x, std::span<const double> z,
                               const std::vector<int>& caps) {
  std::vector<double> rtz(inst.total_paths, 0.0);
  inst.routing.multiply_transpose(z, rtz);
  double acc = 0.0;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double total = 0.0;
    int nonzeros = 0;
    for (double v : inst.flow_block(x, k)) {
      total += v;
      if (v > 0.0) ++nonzeros;
    }
    const double grad = -utility_grad({inst.beta, inst.flow_sizes[k]}, total);
    const bool at_cap = nonzeros >= caps[k];
    for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
      const std::size_t idx = inst.block_offset[k] + i;
      const double d = grad - rtz[idx];
      if (x.rates[idx] > 0.0) {
        acc += d * d;
      } else if (!at_cap) {
        const double r = std::max(0.0, -d);
        acc += r * r;
      }
      // At-cap zero coordinates are unconstrained directions of the
      // cardinality set's normal cone.
    }
  }
  return std::sqrt(acc);
}

struct DriverSetup {
  ProblemKind problem;
  CriteriaKind criteria;
  bool use_caps;  ///< dispatch the x-update on w_k
};

SolveReport run_admm(const ProblemInstance& inst, const SolveOptions& opts,
                     const DriverSetup& setup) {
  check_options(opts);
  const std::size_t num_links = inst.num_links;
  const std::size_t total_paths = inst.total_paths;

  const SpectralNormEstimate norm = spectral_norm_sq(inst.routing);
  const double norm_sq = norm.value;

  AdmmState state;
  state.rho = opts.rho0;
  state.mu = opts.mu_factor * state.rho * norm_sq;
  state.iter = 0;

  // The utility and its slope are undefined at zero total rate, so the
  // start point is a small strictly positive allocation.
  state.x.rates.assign(total_paths, 0.0);
  const double base_rate =
      min_capacity(inst) / (2.0 * static_cast<double>(total_paths));
  if (opts.random_init) {
    std::mt19937_64 rng(opts.seed);
    for (double& v : state.x.rates) {
      const double u =
          static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
      v = base_rate * (0.5 + u);
    }
  } else {
    std::fill(state.x.rates.begin(), state.x.rates.end(), base_rate);
  }

  std::vector<double> rx(num_links, 0.0);
  inst.routing.multiply(state.x.rates, rx);
  state.y.resize(num_links);
  for (std::size_t l = 0; l < num_links; ++l) {
    state.y[l] = std::min(rx[l], inst.capacities[l]);
    if (setup.problem == ProblemKind::kMopc) {
      state.y[l] = std::max(state.y[l], 0.0);
    }
  }
  state.z.assign(num_links, 0.0);
  state.last_dx.assign(total_paths, 0.0);
  state.last_dy.assign(num_links, 0.0);
  state.last_dz.assign(num_links, 0.0);

  SolveReport report;
  report.dual_column =
      (setup.criteria == CriteriaKind::kConvex) ? "d_res" : "y_dif";
  report.trace.reserve(static_cast<std::size_t>(opts.max_iters));

  const double initial_lag = augmented_lagrangian(
      inst, state.x, state.y, state.z, state.rho, setup.problem);
  const double divergence_ceiling =
      opts.divergence_factor * std::max(1.0, std::fabs(initial_lag));

  // The y-subproblem is solved to a tolerance tied to the outer stopping
  // tolerance so that termination-time optimality residuals track it.
  const double t_tol = std::min(1e-8, opts.eps_tol1 * opts.eps_tol1);

  std::vector<double> resid(num_links);
  std::vector<double> q(total_paths);
  std::vector<double> nu(total_paths);
  std::vector<double> theta(num_links);
  Allocation x_prev;
  AdmmState prev_state;
  bool have_prev = false;

  const double gamma =
      (setup.criteria == CriteriaKind::kConvex) ? opts.gamma : 1.0;

  report.status = SolveStatus::kMaxIters;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    // x-update on the linearized proximal target nu = x + (rho/mu) q,
    // q = R^T (y - Rx + z/rho).
    inst.routing.multiply(state.x.rates, rx);
    for (std::size_t l = 0; l < num_links; ++l) {
      resid[l] = state.y[l] - rx[l] + state.z[l] / state.rho;
    }
    inst.routing.multiply_transpose(resid, q);
    const double scale = state.rho / state.mu;
    for (std::size_t i = 0; i < total_paths; ++i) {
      nu[i] = state.x.rates[i] + scale * q[i];
    }

    x_prev = state.x;
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      ProxInput block;
      const std::size_t begin = inst.block_offset[k];
      const std::size_t len = inst.paths_per_flow[k];
      block.nu.assign(nu.begin() + begin, nu.begin() + begin + len);
      block.mu = state.mu;
      block.params = {inst.beta, inst.flow_sizes[k]};
      block.cardinality_cap =
          setup.use_caps ? inst.cardinality_caps[k] : static_cast<int>(len);
      const std::vector<double> xk = prox_block(block);
      std::copy(xk.begin(), xk.end(), state.x.rates.begin() + begin);
    }
    for (std::size_t i = 0; i < total_paths; ++i) {
      state.last_dx[i] = state.x.rates[i] - x_prev.rates[i];
    }

    // y-update on theta = R x - z / rho.
    inst.routing.multiply(state.x.rates, rx);
    for (std::size_t l = 0; l < num_links; ++l) {
      theta[l] = rx[l] - state.z[l] / state.rho;
    }
    std::vector<double> y_new;
    if (setup.problem == ProblemKind::kNum) {
      y_new = project_y_num(theta, inst.capacities);
    } else {
      YProxInput yin;
      yin.theta = theta;
      yin.capacities = inst.capacities;
      yin.alpha = inst.alpha;
      yin.rho = state.rho;
      y_new = solve_y_mopc(yin, t_tol).y;
    }
    for (std::size_t l = 0; l < num_links; ++l) {
      state.last_dy[l] = y_new[l] - state.y[l];
      state.y[l] = y_new[l];
    }

    // Multiplier update (relaxed step length on the convex path only).
    for (std::size_t l = 0; l < num_links; ++l) {
      state.last_dz[l] = gamma * state.rho * (state.y[l] - rx[l]);
      state.z[l] += state.last_dz[l];
    }
    state.iter = iter;

    double dz_sq = 0.0;
    for (double v : state.last_dz) dz_sq += v * v;
    report.sum_dz_sq += dz_sq;
    report.max_z_norm = std::max(report.max_z_norm, norm2(state.z));

    const Residuals res = compute_residuals(state, inst, setup.criteria, opts);
    const double lag = augmented_lagrangian(inst, state.x, state.y, state.z,
                                            state.rho, setup.problem);
    const double obj = problem_objective(inst, state.x, setup.problem);

    TraceRecord rec;
    rec.iter = iter;
    rec.rho = state.rho;
    rec.mu = state.mu;
    rec.p_res = res.p_res;
    rec.dual = (setup.criteria == CriteriaKind::kConvex) ? res.d_res : res.y_dif;
    rec.vio = res.vio;
    rec.aug_lagrangian = lag;
    rec.objective = obj;
    report.trace.push_back(rec);

    if (opts.audit_decrease && have_prev && prev_state.rho == state.rho) {
      report.audits.push_back(
          audit_decrease(prev_state, state, inst, norm_sq, setup.problem));
    }
    if (opts.audit_decrease) {
      prev_state = state;
      have_prev = true;
    }

    if (!std::isfinite(lag) || std::fabs(lag) > divergence_ceiling) {
      report.status = SolveStatus::kError;
      report.message = "augmented Lagrangian exceeded divergence ceiling at iteration " +
                       std::to_string(iter);
      break;
    }

    bool converged = false;
    if (setup.criteria == CriteriaKind::kConvex) {
      converged = res.p_res <= res.p_threshold &&
                  res.d_res <= res.d_threshold && res.vio <= opts.eps_tol2;
    } else {
      converged = res.p_res <= opts.eps_tol1 && res.y_dif <= opts.eps_tol1 &&
                  res.vio <= opts.eps_tol2;
    }
    if (converged) {
      report.status = SolveStatus::kConverged;
      break;
    }

    update_rho(state, res, opts, setup.criteria, norm_sq, opts.rho0);
  }

  report.iterations = state.iter;
  report.final_x = state.x;
  report.y_final = state.y;
  report.z_final = state.z;
  if (report.status != SolveStatus::kError) {
    report.metrics = compute_metrics(inst, state.x);
    std::vector<int> caps = inst.cardinality_caps;
    if (!setup.use_caps) {
      for (std::size_t k = 0; k < inst.num_flows; ++k) {
        caps[k] = static_cast<int>(inst.paths_per_flow[k]);
      }
    }
    report.stationarity_x =
        stationarity_x_residual(inst, state.x, state.z, caps);
    report.stationarity_y = stationarity_y_residual(
        inst, state.y, state.z,
        setup.problem == ProblemKind::kMopc ? inst.alpha : 0.0,
        /*lower_bounded=*/setup.problem == ProblemKind::kMopc);
  } else {
    report.metrics = Metrics{};
  }
  return report;
}

}  // namespace

SolveReport solve_num(const ProblemInstance& inst, const SolveOptions& opts) {
  DriverSetup setup{ProblemKind::kNum, CriteriaKind::kConvex,
                    /*use_caps=*/false};
  return run_admm(inst, opts, setup);
}

SolveReport solve_mopc(const ProblemInstance& inst, const SolveOptions& opts) {
  bool convex_scenario = true;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    if (static_cast<std::size_t>(inst.cardinality_caps[k]) <
        inst.paths_per_flow[k]) {
      convex_scenario = false;
      break;
    }
  }
  DriverSetup setup{ProblemKind::kMopc,
                    convex_scenario ? CriteriaKind::kConvex
                                    : CriteriaKind::kNonconvex,
                    /*use_caps=*/true};
  return run_admm(inst, opts, setup);
}

Residuals compute_residuals(const AdmmState& state,
                            const ProblemInstance& inst, CriteriaKind kind,
                            const SolveOptions& opts) {
  const std::size_t num_links = inst.num_links;
  std::vector<double> rx(num_links);
  inst.routing.multiply(state.x.rates, rx);

  double gap_sq = 0.0, vio_sq = 0.0, y_sq = 0.0, rx_sq = 0.0, c_sq = 0.0;
  for (std::size_t l = 0; l < num_links; ++l) {
    const double gap = state.y[l] - rx[l];
    gap_sq += gap * gap;
    const double over = std::max(rx[l] - inst.capacities[l], 0.0);
    vio_sq += over * over;
    y_sq += state.y[l] * state.y[l];
    rx_sq += rx[l] * rx[l];
    c_sq += inst.capacities[l] * inst.capacities[l];
  }
  const double sqrt_links = std::sqrt(static_cast<double>(num_links));
  const double p_abs = std::sqrt(gap_sq);
  const double y_norm = std::sqrt(y_sq);

  Residuals res;
  res.vio = std::sqrt(vio_sq) / std::max(sqrt_links, std::sqrt(c_sq));

  std::vector<double> rt_dy(inst.total_paths);
  inst.routing.multiply_transpose(state.last_dy, rt_dy);
  res.d_res = state.rho * norm2(rt_dy);

  double y_prev_sq = 0.0;
  double dy_sq = 0.0;
  for (std::size_t l = 0; l < num_links; ++l) {
    const double prev = state.y[l] - state.last_dy[l];
    y_prev_sq += prev * prev;
    dy_sq += state.last_dy[l] * state.last_dy[l];
  }
  res.y_dif = std::sqrt(dy_sq) / std::max(sqrt_links, std::sqrt(y_prev_sq));

  if (kind == CriteriaKind::kConvex) {
    res.p_res = p_abs;
    res.p_threshold = sqrt_links * opts.eps_abs +
                      opts.eps_rel * std::max(y_norm, std::sqrt(rx_sq));
    std::vector<double> rt_z(inst.total_paths);
    inst.routing.multiply_transpose(state.z, rt_z);
    res.d_threshold =
        std::sqrt(static_cast<double>(inst.total_paths)) * opts.eps_abs +
        opts.eps_rel * norm2(rt_z);
  } else {
    res.p_res = p_abs / std::max(sqrt_links, y_norm);
    res.p_threshold = opts.eps_tol1;
    res.d_threshold = opts.eps_tol1;
  }
  return res;
}

AuditRecord audit_decrease(const AdmmState& prev, const AdmmState& next,
                           const ProblemInstance& inst,
                           double routing_norm_sq, ProblemKind kind) {
  if (prev.rho != next.rho || prev.mu != next.mu) {
    throw std::invalid_argument(
        "audit_decrease: states were produced under different rho or mu");
  }
  const double lag_prev =
      augmented_lagrangian(inst, prev.x, prev.y, prev.z, prev.rho, kind);
  const double lag_next =
      augmented_lagrangian(inst, next.x, next.y, next.z, next.rho, kind);

  double dx_sq = 0.0, dy_sq = 0.0, dz_sq = 0.0;
  for (std::size_t i = 0; i < next.x.rates.size(); ++i) {
    const double d = next.x.rates[i] - prev.x.rates[i];
    dx_sq += d * d;
  }
  for (std::size_t l = 0; l < next.y.size(); ++l) {
    const double dy = next.y[l] - prev.y[l];
    const double dz = next.z[l] - prev.z[l];
    dy_sq += dy * dy;
    dz_sq += dz * dz;
  }

  AuditRecord rec;
  rec.iter = next.iter;
  rec.lhs = lag_prev - lag_next + dz_sq / next.rho;
  rec.rhs = 0.5 * (next.mu - next.rho * routing_norm_sq) * dx_sq +
            0.5 * next.rho * dy_sq;
  rec.slack = rec.lhs - rec.rhs;
  rec.scale = std::max(1.0, std::fabs(lag_prev));
  rec.ok = rec.slack >= -1e-8 * rec.scale;
  return rec;
}

AuditRecord audit_decrease(const AdmmState& prev, const AdmmState& next,
                           const ProblemInstance& inst) {
  return audit_decrease(prev, next, inst, spectral_norm_sq(inst.routing).value);
}

double update_rho(AdmmState& state, const Residuals& res,
                  const SolveOptions& opts, CriteriaKind kind,
                  double routing_norm_sq, double rho0) {
  RhoSchedule::Kind schedule = opts.rho_schedule.kind;
  if (schedule == RhoSchedule::Kind::kAuto) {
    schedule = (kind == CriteriaKind::kConvex) ? RhoSchedule::Kind::kAdaptive
                                               : RhoSchedule::Kind::kIncreasing;
  }
  double rho = state.rho;
  switch (schedule) {
    case RhoSchedule::Kind::kAdaptive:
      if (res.p_res > 10.0 * res.d_res) {
        rho *= 2.0;
      } else if (res.d_res > 10.0 * res.p_res) {
        rho *= 0.5;
      }
      break;
    case RhoSchedule::Kind::kIncreasing:
      if (opts.rho_schedule.period > 0 &&
          state.iter % opts.rho_schedule.period == 0) {
        rho = std::min(rho * opts.rho_schedule.factor,
                       opts.rho_schedule.ceiling_factor * rho0);
      }
      break;
    case RhoSchedule::Kind::kFixed:
    case RhoSchedule::Kind::kAuto:
      break;
  }
  state.rho = rho;
  state.mu = opts.mu_factor * rho * routing_norm_sq;
  return rho;
}

}  // namespace wanopt
