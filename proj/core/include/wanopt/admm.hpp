// Consensus ADMM drivers for the two allocation problems, residual and
// stopping-criteria bookkeeping, penalty scheduling, and the per-iteration
// decrease audit.
#pragma once

#include <cstdint>

#include "wanopt/instance.hpp"
#include "wanopt/report.hpp"
#include "wanopt/utility.hpp"

namespace wanopt {

/// Which stopping-criteria family a run uses: the convex family compares
/// raw primal/dual residual norms against absolute+relative thresholds; the
/// non-convex family uses normalized primal residual and successive
/// y-difference.
enum class CriteriaKind { kConvex, kNonconvex };

struct RhoSchedule {
  enum class Kind {
    kAuto,        ///< adaptive on the convex path, increasing otherwise
    kAdaptive,    ///< x2 / x0.5 balancing of primal vs dual residuals
    kIncreasing,  ///< rho *= factor every `period` iterations
    kFixed,
  };
  Kind kind = Kind::kAuto;
  double factor = 1.5;
  int period = 100;
  double ceiling_factor = 1e8;  ///< rho never exceeds ceiling_factor * rho0
};

struct SolveOptions {
  double rho0 = 1.0;
  double mu_factor = 1.1;  ///< mu = mu_factor * rho * ||R||_2^2, must be > 1
  double gamma = 1.618;    ///< multiplier step length on the convex path
  int max_iters = 1500;
  double eps_abs = 1e-4;
  double eps_rel = 1e-4;
  double eps_tol1 = 1e-4;   ///< non-convex p_res / y_dif tolerance
  double eps_tol2 = 1e-10;  ///< normalized capacity-violation tolerance
  RhoSchedule rho_schedule;
  bool audit_decrease = false;
  bool random_init = false;
  std::uint64_t seed = 0;
  double divergence_factor = 1e12;
};

struct Residuals {
  double p_res = 0.0;  ///< raw ||y - Rx|| (convex) or normalized (non-convex)
  double d_res = 0.0;  ///< ||rho R^T (y - y_prev)||
  double vio = 0.0;    ///< ||max(Rx - c, 0)|| / max(sqrt(L), ||c||)
  double y_dif = 0.0;  ///< ||y - y_prev|| / max(sqrt(L), ||y_prev||)
  double p_threshold = 0.0;
  double d_threshold = 0.0;
};

struct AdmmState {
  Allocation x;
  std::vector<double> y;
  std::vector<double> z;
  double rho = 0.0;
  double mu = 0.0;
  int iter = 0;
  std::vector<double> last_dx;  ///< x - x_prev
  std::vector<double> last_dy;  ///< y - y_prev
  std::vector<double> last_dz;  ///< z - z_prev
};

/// Solves the capacity-constrained utility maximization (no load term, no
/// cardinality caps). Terminates on the convex criteria or max_iters.
SolveReport solve_num(const ProblemInstance& inst,
                      const SolveOptions& opts = {});

/// Solves the multi-objective problem with per-flow path cardinality caps.
/// When every cap equals its flow's path count the run is convex and uses
/// the convex criteria, the adaptive penalty rule and the relaxed
/// multiplier step; otherwise the non-convex criteria, the increasing
/// penalty schedule and the plain multiplier step.
SolveReport solve_mopc(const ProblemInstance& inst,
                       const SolveOptions& opts = {});

Residuals compute_residuals(const AdmmState& state,
                            const ProblemInstance& inst, CriteriaKind kind,
                            const SolveOptions& opts);

/// Evaluates the fixed-rho decrease inequality between two consecutive
/// iterates (see AuditRecord). Both states must share rho and mu.
AuditRecord audit_decrease(const AdmmState& prev, const AdmmState& next,
                           const ProblemInstance& inst,
                           double routing_norm_sq,
                           ProblemKind kind = ProblemKind::kMopc);
AuditRecord audit_decrease(const AdmmState& prev, const AdmmState& next,
                           const ProblemInstance& inst);

/// Applies the penalty schedule in place (mu is recomputed from the new rho;
/// the unscaled multiplier z needs no rescaling). Returns the new rho.
double update_rho(AdmmState& state, const Residuals& res,
                  const SolveOptions& opts, CriteriaKind kind,
                  double routing_norm_sq, double rho0);

}  // namespace wanopt
