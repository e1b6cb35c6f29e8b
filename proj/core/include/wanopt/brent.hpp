// Single-variable bounded minimization: golden section search with
// successive parabolic interpolation (Brent's method).
#pragma once

#include <cmath>

namespace wanopt {

struct ScalarMinResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Minimizes f over [a, b] to absolute x-tolerance x_tol with at most
/// max_evals function evaluations. f must be continuous; convergence to the
/// global minimum is guaranteed for unimodal f.
template <class F>
ScalarMinResult minimize_scalar(F&& f, double a, double b, double x_tol,
                                int max_evals) {
  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
  const double sqrt_eps = std::sqrt(2.220446049250313e-16);

  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  int evals = 1;
  double d = 0.0, e = 0.0;

  while (evals < max_evals) {
    const double mid = 0.5 * (a + b);
    const double tol1 = sqrt_eps * std::fabs(x) + x_tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a)) break;

    bool use_golden = true;
    if (std::fabs(e) > tol1) {
      // Fit a parabola through (v, fv), (w, fw), (x, fx).
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double e_old = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < mid) ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x < mid) ? b - x : a - x;
      d = kGolden * e;
    }

    const double u =
        (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = f(u);
    ++evals;

    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, evals};
}

}  // namespace wanopt
