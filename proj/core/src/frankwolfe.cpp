#include "wanopt/frankwolfe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wanopt/brent.hpp"
#include "wanopt/simplex.hpp"
#include "wanopt/utility.hpp"

namespace wanopt {

RelaxedInstance build_relaxed(const ProblemInstance& inst) {
  RelaxedInstance relaxed;
  relaxed.base = inst;
  relaxed.bottleneck_caps.reserve(inst.total_paths);
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    for (const auto& path : inst.paths[k]) {
      double cap = inst.capacities[path.front()];
      for (std::size_t link : path) {
        cap = std::min(cap, inst.capacities[link]);
      }
      relaxed.bottleneck_caps.push_back(cap);
    }
  }
  return relaxed;
}

FwPoint lmo(const RelaxedInstance& relaxed, std::span<const double> grad_x,
            double grad_t, bool cardinality_rows) {
  const ProblemInstance& inst = relaxed.base;
  const std::size_t num_paths = inst.total_paths;
  if (grad_x.size() != num_paths) {
    throw std::invalid_argument("lmo: gradient length mismatch");
  }
  for (double g : grad_x) {
    if (!std::isfinite(g)) throw std::invalid_argument("lmo: gradient not finite");
  }

  LinearProgram lp;
  lp.num_vars = num_paths + 1;  // (x, t)
  const std::size_t t_col = num_paths;

  // Link rows Rx - t c <= 0, scaled by 1/c so entries stay O(1).
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    std::vector<double> row(lp.num_vars, 0.0);
    const double inv_c = 1.0 / inst.capacities[l];
    for (std::uint32_t col : inst.routing.row_cols(l)) row[col] = inv_c;
    row[t_col] = -1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(0.0);
  }
  if (cardinality_rows) {
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      std::vector<double> row(lp.num_vars, 0.0);
      for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
        const std::size_t idx = inst.block_offset[k] + i;
        row[idx] = 1.0 / relaxed.bottleneck_caps[idx];
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(static_cast<double>(inst.cardinality_caps[k]));
    }
  }
  {
    std::vector<double> row(lp.num_vars, 0.0);
    row[t_col] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(1.0);
  }

  lp.cost.assign(grad_x.begin(), grad_x.end());
  lp.cost.push_back(grad_t);

  const LpSolution sol = solve_lp(lp);
  FwPoint v;
  v.x.rates.assign(sol.x.begin(), sol.x.begin() + num_paths);
  v.t = sol.x[t_col];
  return v;
}

namespace {

double relaxed_objective(const ProblemInstance& inst, const Allocation& x,
                         double t) {
  double value = inst.alpha * t;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double total = 0.0;
    for (double v : inst.flow_block(x, k)) total += v;
    value -= utility_value({inst.beta, inst.flow_sizes[k]}, total);
  }
  return value;
}

}  // namespace

SolveReport fw_solve(const RelaxedInstance& relaxed, const FwOptions& opts) {
  const ProblemInstance& inst = relaxed.base;
  const std::size_t num_paths = inst.total_paths;
  if (opts.max_iters < 1) throw std::invalid_argument("fw: max_iters must be >= 1");

  // Positivity floors: the utility is undefined at zero total rate, so the
  // start point is strictly interior and steps are clipped to keep every
  // block total above its floor.
  std::vector<double> floor_norm(inst.num_flows);
  Allocation x;
  x.rates.assign(num_paths, 0.0);
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double min_cap = relaxed.bottleneck_caps[inst.block_offset[k]];
    for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
      min_cap = std::min(min_cap, relaxed.bottleneck_caps[inst.block_offset[k] + i]);
    }
    floor_norm[k] = 1e-12 * min_cap;
    const double start =
        1e-3 * min_cap / static_cast<double>(inst.total_paths);
    for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
      x.rates[inst.block_offset[k] + i] = start;
    }
  }
  std::vector<double> rx(inst.num_links);
  inst.routing.multiply(x.rates, rx);
  double t = 1e-12;
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    t = std::max(t, rx[l] / inst.capacities[l]);
  }

  SolveReport report;
  report.dual_column = "gap";
  report.status = SolveStatus::kMaxIters;

  std::vector<double> grad(num_paths);
  std::vector<double> totals(inst.num_flows);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      double total = 0.0;
      for (double v : inst.flow_block(x, k)) total += v;
      totals[k] = total;
      const double g = -utility_grad({inst.beta, inst.flow_sizes[k]}, total);
      for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
        grad[inst.block_offset[k] + i] = g;
      }
    }
    const double grad_t = inst.alpha;

    const FwPoint v = lmo(relaxed, grad, grad_t, opts.cardinality_rows);

    double gap = grad_t * (t - v.t);
    for (std::size_t i = 0; i < num_paths; ++i) {
      gap += grad[i] * (x.rates[i] - v.x.rates[i]);
    }
    const double objective = relaxed_objective(inst, x, t);

    {
      TraceRecord rec;
      rec.iter = iter;
      rec.p_res = 0.0;
      rec.dual = gap;
      inst.routing.multiply(x.rates, rx);
      double vio_sq = 0.0, c_sq = 0.0;
      for (std::size_t l = 0; l < inst.num_links; ++l) {
        const double over = std::max(rx[l] - inst.capacities[l], 0.0);
        vio_sq += over * over;
        c_sq += inst.capacities[l] * inst.capacities[l];
      }
      rec.vio = std::sqrt(vio_sq) /
                std::max(std::sqrt(static_cast<double>(inst.num_links)),
                         std::sqrt(c_sq));
      rec.aug_lagrangian = objective;
      rec.objective = objective;
      report.trace.push_back(rec);
    }
    report.iterations = iter;

    if (gap <= opts.gap_rel_tol * std::max(1.0, std::fabs(objective))) {
      report.status = SolveStatus::kConverged;
      break;
    }

    // Largest admissible step along (v - x): keep every block total at or
    // above its floor.
    double eta_max = 1.0;
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      double v_total = 0.0;
      for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
        v_total += v.x.rates[inst.block_offset[k] + i];
      }
      if (v_total < floor_norm[k] && totals[k] > v_total) {
        eta_max = std::min(
            eta_max, (totals[k] - floor_norm[k]) / (totals[k] - v_total));
      }
    }
    eta_max = std::max(eta_max, 0.0);

    double eta;
    if (opts.line_search) {
      const auto line = [&](double s) {
        double value = inst.alpha * ((1.0 - s) * t + s * v.t);
        for (std::size_t k = 0; k < inst.num_flows; ++k) {
          double total = 0.0;
          for (std::size_t i = 0; i < inst.paths_per_flow[k]; ++i) {
            const std::size_t idx = inst.block_offset[k] + i;
            total += (1.0 - s) * x.rates[idx] + s * v.x.rates[idx];
          }
          value -= utility_value({inst.beta, inst.flow_sizes[k]}, total);
        }
        return value;
      };
      eta = minimize_scalar(line, 0.0, eta_max, 1e-10, 200).x;
    } else {
      eta = std::min(2.0 / static_cast<double>(iter + 1), eta_max);
    }

    for (std::size_t i = 0; i < num_paths; ++i) {
      x.rates[i] = (1.0 - eta) * x.rates[i] + eta * v.x.rates[i];
    }
    t = (1.0 - eta) * t + eta * v.t;
  }

  report.final_x = x;
  inst.routing.multiply(x.rates, rx);
  report.y_final = rx;
  report.metrics = compute_metrics(inst, x);
  return report;
}

Allocation project_cardinality(const ProblemInstance& inst, const Allocation& x,
                               const std::vector<int>& caps) {
  if (x.size() != inst.total_paths || caps.size() != inst.num_flows) {
    throw std::invalid_argument("project_cardinality: dimension mismatch");
  }
  for (double v : x.rates) {
    if (v < 0.0) throw std::invalid_argument("project_cardinality: x must be nonnegative");
  }
  Allocation out;
  out.rates.assign(x.rates.size(), 0.0);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    const std::size_t begin = inst.block_offset[k];
    const std::size_t len = inst.paths_per_flow[k];
    order.resize(len);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return x.rates[begin + a] > x.rates[begin + b];
                     });
    const std::size_t keep =
        std::min(static_cast<std::size_t>(caps[k]), len);
    for (std::size_t r = 0; r < keep; ++r) {
      out.rates[begin + order[r]] = x.rates[begin + order[r]];
    }
  }
  return out;
}

Allocation project_cardinality(const ProblemInstance& inst,
                               const Allocation& x) {
  return project_cardinality(inst, x, inst.cardinality_caps);
}

}  // namespace wanopt
