#include "wanopt/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wanopt/brent.hpp"
#include "wanopt/cubic.hpp"

namespace wanopt {

namespace {

void check_input(const ProxInput& in) {
  if (in.nu.empty()) throw std::invalid_argument("prox: empty block");
  if (!(in.mu > 0.0)) throw std::invalid_argument("prox: mu must be positive");
  if (in.cardinality_cap < 1 ||
      static_cast<std::size_t>(in.cardinality_cap) > in.nu.size()) {
    throw std::invalid_argument("prox: cardinality cap out of range");
  }
  if (in.params.beta < 0.0 || !(in.params.flow_size > 0.0)) {
    throw std::invalid_argument("prox: invalid utility parameters");
  }
}

// Indices of nu sorted by descending value, ties by ascending index.
std::vector<std::size_t> descending_order(const std::vector<double>& nu) {
  std::vector<std::size_t> order(nu.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return nu[a] > nu[b]; });
  return order;
}

// Solves mu * zeta = U'(sum_{i<=limit} max(0, nu_sorted_i + zeta)) for the
// first `limit` entries of the sorted block. Returns zeta and, through the
// detail struct, the bracketing breakpoint and the number of summed terms.
//
// Scan the candidates zeta = -nu_sorted[i'] for i' = 2..limit in order: the
// left side mu*zeta grows with zeta while the right side shrinks, so the
// first candidate with mu*zeta >= U'(...) pins the interval
// (-nu_sorted[i'-1], -nu_sorted[i']] and the cubic sums i'-1 terms.
// Otherwise the root lies above every breakpoint and all `limit` terms stay
// active.
double solve_zeta(const std::vector<double>& nu_sorted, std::size_t limit,
                  double mu, const UtilityParams& params, ProxDetail* detail) {
  std::vector<double> prefix(limit + 1, 0.0);
  for (std::size_t i = 0; i < limit; ++i) {
    prefix[i + 1] = prefix[i] + nu_sorted[i];
  }

  std::size_t kept = limit;
  int breakpoint = 0;
  for (std::size_t ip = 2; ip <= limit; ++ip) {  // 1-based sorted position
    const double cand = -nu_sorted[ip - 1];
    if (!(cand > 0.0)) continue;  // only positive shifts are candidates
    // At zeta = cand the entries below position ip are clipped to zero.
    const double active_sum = prefix[ip - 1] + static_cast<double>(ip - 1) * cand;
    if (!(active_sum > 0.0)) continue;  // U' undefined; condition cannot hold
    if (mu * cand >= utility_grad(params, active_sum)) {
      kept = ip - 1;
      breakpoint = static_cast<int>(ip);
      break;
    }
  }

  const double zeta = solve_breakpoint_cubic(
      mu, params.beta, params.flow_size, prefix[kept], static_cast<int>(kept));
  if (detail != nullptr) {
    detail->zeta = zeta;
    detail->kept = static_cast<int>(kept);
    detail->breakpoint_index = breakpoint;
  }
  return zeta;
}

}  // namespace

std::vector<double> prox_no_card(const ProxInput& in, ProxDetail* detail) {
  check_input(in);
  if (static_cast<std::size_t>(in.cardinality_cap) != in.nu.size()) {
    throw std::invalid_argument("prox_no_card: cap must equal block size");
  }
  const auto order = descending_order(in.nu);
  std::vector<double> nu_sorted(in.nu.size());
  for (std::size_t i = 0; i < order.size(); ++i) nu_sorted[i] = in.nu[order[i]];

  const double zeta =
      solve_zeta(nu_sorted, nu_sorted.size(), in.mu, in.params, detail);

  std::vector<double> x(in.nu.size());
  for (std::size_t i = 0; i < in.nu.size(); ++i) {
    x[i] = std::max(0.0, in.nu[i] + zeta);
  }
  return x;
}

std::vector<double> prox_card_one(const ProxInput& in, ProxDetail* detail) {
  check_input(in);
  if (in.cardinality_cap != 1) {
    throw std::invalid_argument("prox_card_one: cap must be 1");
  }
  const std::size_t best = static_cast<std::size_t>(
      std::max_element(in.nu.begin(), in.nu.end()) - in.nu.begin());
  const Cubic cubic{in.mu, -in.mu * in.nu[best], -in.params.beta,
                    -in.params.flow_size};
  const double value = max_real_root(cubic);
  if (detail != nullptr) {
    detail->zeta = value - in.nu[best];
    detail->kept = 1;
    detail->breakpoint_index = 0;
  }
  std::vector<double> x(in.nu.size(), 0.0);
  x[best] = value;
  return x;
}

std::vector<double> prox_card_w(const ProxInput& in, ProxDetail* detail) {
  check_input(in);
  const std::size_t cap = static_cast<std::size_t>(in.cardinality_cap);
  if (cap <= 1 || cap >= in.nu.size()) {
    throw std::invalid_argument("prox_card_w: cap must satisfy 1 < w < P_k");
  }
  const auto order = descending_order(in.nu);
  std::vector<double> nu_sorted(in.nu.size());
  for (std::size_t i = 0; i < order.size(); ++i) nu_sorted[i] = in.nu[order[i]];

  const double zeta = solve_zeta(nu_sorted, cap, in.mu, in.params, detail);

  std::vector<double> x(in.nu.size(), 0.0);
  for (std::size_t rank = 0; rank < cap; ++rank) {
    x[order[rank]] = std::max(0.0, nu_sorted[rank] + zeta);
  }
  return x;
}

std::vector<double> prox_block(const ProxInput& in, ProxDetail* detail) {
  if (in.cardinality_cap == 1 && in.nu.size() > 1) return prox_card_one(in, detail);
  if (static_cast<std::size_t>(in.cardinality_cap) >= in.nu.size()) {
    return prox_no_card(in, detail);
  }
  return prox_card_w(in, detail);
}

std::vector<double> project_y_num(std::span<const double> theta,
                                  std::span<const double> capacities) {
  if (theta.size() != capacities.size()) {
    throw std::invalid_argument("project_y_num: length mismatch");
  }
  std::vector<double> y(theta.size());
  for (std::size_t l = 0; l < theta.size(); ++l) {
    y[l] = std::min(theta[l], capacities[l]);
  }
  return y;
}

namespace {

std::vector<double> clamp_to_scaled_box(const std::vector<double>& theta,
                                        const std::vector<double>& c,
                                        double t) {
  std::vector<double> y(theta.size());
  for (std::size_t l = 0; l < theta.size(); ++l) {
    const double upper = std::min(c[l], t * c[l]);
    y[l] = std::clamp(theta[l], 0.0, upper);
  }
  return y;
}

}  // namespace

YProxResult solve_y_mopc(const YProxInput& in, double t_tol, int max_evals) {
  const std::size_t num_links = in.theta.size();
  if (in.capacities.size() != num_links) {
    throw std::invalid_argument("solve_y_mopc: length mismatch");
  }
  if (!(in.rho > 0.0)) throw std::invalid_argument("solve_y_mopc: rho must be positive");
  if (in.alpha < 0.0) throw std::invalid_argument("solve_y_mopc: alpha must be nonnegative");
  for (double c : in.capacities) {
    if (!(c > 0.0)) throw std::invalid_argument("solve_y_mopc: capacities must be positive");
  }

  if (in.alpha == 0.0) {
    // The load term is off and any t covering the clamp is optimal; report
    // the smallest one, the realized utilization of the clamped point.
    YProxResult res;
    res.y = clamp_to_scaled_box(in.theta, in.capacities, 1.0);
    double t = 0.0;
    for (std::size_t l = 0; l < num_links; ++l) {
      t = std::max(t, res.y[l] / in.capacities[l]);
    }
    res.t_star = t;
    return res;
  }

  const auto phi = [&](double t) {
    double quad = 0.0;
    for (std::size_t l = 0; l < num_links; ++l) {
      const double upper = std::min(in.capacities[l], t * in.capacities[l]);
      const double yl = std::clamp(in.theta[l], 0.0, upper);
      const double gap = yl - in.theta[l];
      quad += gap * gap;
    }
    return in.alpha * t + 0.5 * in.rho * quad;
  };

  const ScalarMinResult min = minimize_scalar(phi, 0.0, 1.0, t_tol, max_evals);

  // The interior search never probes the endpoints exactly; t = 0 wins
  // whenever every theta is nonpositive.
  double t_star = min.x;
  if (phi(1.0) < min.fx) t_star = 1.0;
  if (phi(0.0) <= std::min(min.fx, phi(t_star))) t_star = 0.0;

  YProxResult res;
  res.t_star = t_star;
  res.y = clamp_to_scaled_box(in.theta, in.capacities, t_star);
  return res;
}

}  // namespace wanopt
