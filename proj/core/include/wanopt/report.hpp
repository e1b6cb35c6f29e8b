// Solve reports: per-iteration trace, audits, final metrics, file writers.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wanopt/instance.hpp"

namespace wanopt {

enum class SolveStatus { kConverged, kMaxIters, kError };

const char* to_string(SolveStatus s);

struct TraceRecord {
  int iter = 0;
  double rho = 0.0;
  double mu = 0.0;
  double p_res = 0.0;
  double dual = 0.0;  ///< d_res (convex), y_dif (non-convex) or FW gap
  double vio = 0.0;
  double aug_lagrangian = 0.0;
  double objective = 0.0;
};

/// One evaluation of the per-iteration decrease inequality at fixed rho:
///   lhs = L(prev) - L(next) + (1/rho) ||dz||^2
///   rhs = (mu - rho ||R||^2)/2 ||dx||^2 + (rho/2) ||dy||^2
struct AuditRecord {
  int iter = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< lhs - rhs
  double scale = 1.0;  ///< max(1, |L(prev)|)
  bool ok = true;      ///< slack >= -1e-8 * scale
};

struct SolveReport {
  Allocation final_x;
  std::vector<double> y_final;
  std::vector<double> z_final;
  SolveStatus status = SolveStatus::kError;
  std::string message;
  int iterations = 0;
  Metrics metrics;
  std::vector<TraceRecord> trace;
  std::string dual_column;  ///< name of TraceRecord::dual for this run
  std::vector<AuditRecord> audits;

  // Run diagnostics: multiplier behaviour (for checking the boundedness
  // assumptions post hoc) and stationarity residuals at termination.
  double sum_dz_sq = 0.0;
  double max_z_norm = 0.0;
  double stationarity_x = -1.0;  ///< < 0 when not computed
  double stationarity_y = -1.0;
};

/// Delimited trace, one record per iteration. Column order:
/// iter rho mu p_res <dual_column> vio L_rho obj
void write_trace(std::ostream& out, const SolveReport& report);
void write_trace_file(const std::filesystem::path& path,
                      const SolveReport& report);

/// Structured report (JSON): status, metrics, diagnostics, final vectors.
std::string report_json_text(const SolveReport& report);
void write_report_file(const std::filesystem::path& path,
                       const SolveReport& report);

}  // namespace wanopt
