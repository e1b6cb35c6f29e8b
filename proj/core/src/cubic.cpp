#include "wanopt/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wanopt {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr int kMaxPolishSteps = 60;  // linear rate near double roots

// Damped Newton polish: restores the residual bound after closed-form
// rounding without letting a near-zero derivative (double root) throw away
// an already-accurate root. The typical case takes one step or none.
double polish_root(const Cubic& c, double r) {
  double f = c.eval(r);
  for (int step = 0; step < kMaxPolishSteps; ++step) {
    if (std::fabs(f) <= kResidualTol * c.term_scale(r)) break;
    const double df = c.deriv(r);
    if (df == 0.0 || !std::isfinite(df)) break;
    double delta = f / df;
    if (!std::isfinite(delta)) break;
    double next = r - delta;
    double f_next = c.eval(next);
    int halvings = 0;
    while (std::fabs(f_next) > std::fabs(f) && halvings < 30) {
      delta *= 0.5;
      next = r - delta;
      f_next = c.eval(next);
      ++halvings;
    }
    if (std::fabs(f_next) >= std::fabs(f)) break;
    r = next;
    f = f_next;
  }
  return r;
}

}  // namespace

double Cubic::term_scale(double r) const {
  const double r2 = r * r;
  return std::max({1.0, std::fabs(a3 * r2 * r), std::fabs(a2 * r2),
                   std::fabs(a1 * r), std::fabs(a0)});
}

double max_real_root(const Cubic& c) {
  const double coeff_scale =
      std::max({std::fabs(c.a2), std::fabs(c.a1), std::fabs(c.a0), 1.0});
  if (c.a3 == 0.0 || std::fabs(c.a3) < 1e-300 * coeff_scale) {
    throw std::invalid_argument("cubic: leading coefficient vanishes");
  }

  const double b = c.a2 / c.a3;
  const double cc = c.a1 / c.a3;
  const double d = c.a0 / c.a3;
  const double shift = b / 3.0;
  const double p = cc - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  // The sign of disc picks the closed form, but it is rounded and the pick
  // decides which root is maximal right at a double root. Polish the
  // candidate from each admissible branch and keep the largest one whose
  // residual bound holds.
  double best = 0.0;
  bool have_best = false;
  double fallback = 0.0;
  double fallback_res = 0.0;
  bool have_fallback = false;
  const auto consider = [&](double u) {
    const double r = polish_root(c, u - shift);
    if (!std::isfinite(r)) return;
    const double res = std::fabs(c.eval(r));
    if (res <= kResidualTol * c.term_scale(r)) {
      if (!have_best || r > best) best = r;
      have_best = true;
    } else if (!have_fallback || res < fallback_res) {
      fallback = r;
      fallback_res = res;
      have_fallback = true;
    }
  };

  if (disc >= 0.0) {
    // One real root (plus a conjugate pair). The cube-root terms can cancel
    // when |q| is small; the polish step recovers the lost digits.
    const double sq = std::sqrt(disc);
    consider(std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq));
  }
  if (p < 0.0) {
    // Up to three real roots; the k = 0 branch of the trigonometric form is
    // the largest (theta/3 lies in [0, pi/3]).
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    consider(m * std::cos(std::acos(arg) / 3.0));
  }

  if (have_best) return best;
  return fallback;  // no candidate met the bound; return the closest miss
}

double solve_breakpoint_cubic(double mu, double beta, double s_k,
                              double partial_sum_nu, int m) {
  if (mu <= 0.0) throw std::invalid_argument("breakpoint cubic: mu must be positive");
  if (beta < 0.0) throw std::invalid_argument("breakpoint cubic: beta must be nonnegative");
  if (s_k <= 0.0) throw std::invalid_argument("breakpoint cubic: s_k must be positive");
  if (m < 1) throw std::invalid_argument("breakpoint cubic: m must be >= 1");

  const double md = static_cast<double>(m);
  const double s_sum = partial_sum_nu;
  // mu*z*(S + m*z)^2 - beta*(S + m*z) - s_k expanded in z.
  const Cubic cubic{mu * md * md, 2.0 * mu * s_sum * md,
                    mu * s_sum * s_sum - beta * md, -(beta * s_sum + s_k)};
  const double root = max_real_root(cubic);
  if (!(s_sum + md * root > 0.0)) {
    throw std::runtime_error(
        "breakpoint cubic: no root with positive block sum (solver bug)");
  }
  return root;
}

}  // namespace wanopt
