#include "wanopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wanopt {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr int kStallLimit = 25;
constexpr int kPivotCap = 50000;

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();
  if (lp.rhs.size() != m || lp.cost.size() != n) {
    throw std::invalid_argument("simplex: dimension mismatch");
  }
  for (double b : lp.rhs) {
    if (b < 0.0) throw std::runtime_error("simplex: rhs must be nonnegative");
  }

  // Equilibrate rows and columns to unit max magnitude; the column scales
  // are undone on the way out (x = D x').
  std::vector<double> col_scale(n, 1.0);
  std::vector<std::vector<double>> a(m, std::vector<double>(n, 0.0));
  std::vector<double> b(lp.rhs);
  for (std::size_t i = 0; i < m; ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_max = std::max(row_max, std::fabs(lp.rows[i][j]));
    }
    const double rs = (row_max > 0.0) ? 1.0 / row_max : 1.0;
    for (std::size_t j = 0; j < n; ++j) a[i][j] = lp.rows[i][j] * rs;
    b[i] *= rs;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double col_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) col_max = std::max(col_max, std::fabs(a[i][j]));
    if (col_max > 0.0) {
      col_scale[j] = 1.0 / col_max;
      for (std::size_t i = 0; i < m; ++i) a[i][j] *= col_scale[j];
    }
  }
  std::vector<double> cost(n);
  double cost_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = lp.cost[j] * col_scale[j];
    cost_max = std::max(cost_max, std::fabs(cost[j]));
  }
  if (cost_max > 0.0) {
    for (double& c : cost) c /= cost_max;
  }

  // Tableau: columns 0..n-1 structural, n..n+m-1 slack, last column rhs.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> tab(m + 1, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = a[i][j];
    tab[i][n + i] = 1.0;
    tab[i][width - 1] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) tab[m][j] = cost[j];

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  int pivots = 0;
  int stalled = 0;
  bool bland = false;
  double last_obj = 0.0;

  while (true) {
    // Entering column.
    std::size_t enter = width;
    if (bland) {
      for (std::size_t j = 0; j + 1 < width; ++j) {
        if (tab[m][j] < -kCostTol) { enter = j; break; }
      }
    } else {
      double best = -kCostTol;
      for (std::size_t j = 0; j + 1 < width; ++j) {
        if (tab[m][j] < best) { best = tab[m][j]; enter = j; }
      }
    }
    if (enter == width) break;  // optimal

    // Ratio test; ties by smallest basis index (Bland).
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] > kPivotTol) {
        const double ratio = tab[i][width - 1] / tab[i][enter];
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && leave != m &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex: unbounded ray (solver bug)");

    // Pivot.
    const double piv = tab[leave][enter];
    for (std::size_t j = 0; j < width; ++j) tab[leave][j] /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = tab[i][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) {
        tab[i][j] -= factor * tab[leave][j];
      }
      tab[i][enter] = 0.0;
    }
    basis[leave] = enter;

    if (++pivots > kPivotCap) {
      throw std::runtime_error("simplex: pivot cap exceeded (solver bug)");
    }
    const double obj = -tab[m][width - 1];
    if (obj < last_obj - 1e-13 * std::max(1.0, std::fabs(last_obj))) {
      stalled = 0;
      bland = false;
    } else if (++stalled >= kStallLimit) {
      bland = true;  // degenerate streak: anti-cycling rule until progress
    }
    last_obj = obj;
  }

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = tab[i][width - 1] * col_scale[basis[i]];
  }
  sol.pivots = pivots;
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.cost[j] * sol.x[j];
  return sol;
}

}  // namespace wanopt
