#include "wanopt/utility.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wanopt {

double utility_value(const UtilityParams& p, double t) {
  if (!(t > 0.0)) throw std::domain_error("utility_value: t must be positive");
  return p.beta * std::log(t) - p.flow_size / t;
}

double utility_grad(const UtilityParams& p, double t) {
  if (!(t > 0.0)) throw std::domain_error("utility_grad: t must be positive");
  return p.beta / t + p.flow_size / (t * t);
}

double augmented_lagrangian(const ProblemInstance& inst, const Allocation& x,
                            std::span<const double> y,
                            std::span<const double> z, double rho,
                            ProblemKind kind) {
  if (x.size() != inst.total_paths || y.size() != inst.num_links ||
      z.size() != inst.num_links) {
    throw std::invalid_argument("augmented_lagrangian: dimension mismatch");
  }
  const double box_slack = 1e-9;
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    const double cap = inst.capacities[l];
    if (y[l] > cap * (1.0 + box_slack) + box_slack) {
      throw std::domain_error("augmented_lagrangian: y exceeds capacity set at link " +
                              std::to_string(l));
    }
    if (kind == ProblemKind::kMopc && y[l] < -box_slack * cap - box_slack) {
      throw std::domain_error("augmented_lagrangian: y below zero set at link " +
                              std::to_string(l));
    }
  }

  double value = 0.0;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double total = 0.0;
    for (double v : inst.flow_block(x, k)) {
      if (v < 0.0) {
        throw std::domain_error(
            "augmented_lagrangian: x outside nonnegative set in flow " +
            std::to_string(k));
      }
      total += v;
    }
    value -= utility_value({inst.beta, inst.flow_sizes[k]}, total);
  }

  if (kind == ProblemKind::kMopc) {
    double load = 0.0;
    for (std::size_t l = 0; l < inst.num_links; ++l) {
      load = std::max(load, y[l] / inst.capacities[l]);
    }
    value += inst.alpha * load;
  }

  for (std::size_t l = 0; l < inst.num_links; ++l) {
    const double gap = y[l] - inst.routing.row_dot(l, x.rates);
    value += z[l] * gap + 0.5 * rho * gap * gap;
  }
  return value;
}

}  // namespace wanopt
