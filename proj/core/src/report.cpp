#include "wanopt/report.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wanopt {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIters: return "max_iters";
    case SolveStatus::kError: return "error";
  }
  return "unknown";
}

namespace {

// Shortest round-trip formatting keeps traces reproducible byte for byte.
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void write_trace(std::ostream& out, const SolveReport& report) {
  out << "iter\trho\tmu\tp_res\t"
      << (report.dual_column.empty() ? "dual" : report.dual_column)
      << "\tvio\tL_rho\tobj\n";
  for (const TraceRecord& r : report.trace) {
    out << r.iter << '\t' << fmt(r.rho) << '\t' << fmt(r.mu) << '\t'
        << fmt(r.p_res) << '\t' << fmt(r.dual) << '\t' << fmt(r.vio) << '\t'
        << fmt(r.aug_lagrangian) << '\t' << fmt(r.objective) << '\n';
  }
}

void write_trace_file(const std::filesystem::path& path,
                      const SolveReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("trace: cannot write " + path.string());
  write_trace(out, report);
}

std::string report_json_text(const SolveReport& report) {
  nlohmann::json doc;
  doc["status"] = to_string(report.status);
  if (!report.message.empty()) doc["message"] = report.message;
  doc["iterations"] = report.iterations;
  doc["metrics"] = {{"delay", report.metrics.delay},
                    {"fairness", report.metrics.fairness},
                    {"load", report.metrics.load},
                    {"obj", report.metrics.obj}};
  doc["x"] = report.final_x.rates;
  doc["y"] = report.y_final;
  doc["z"] = report.z_final;
  doc["diagnostics"] = {{"sum_dz_sq", report.sum_dz_sq},
                        {"max_z_norm", report.max_z_norm}};
  if (report.stationarity_x >= 0.0) {
    doc["diagnostics"]["stationarity_x"] = report.stationarity_x;
  }
  if (report.stationarity_y >= 0.0) {
    doc["diagnostics"]["stationarity_y"] = report.stationarity_y;
  }
  if (!report.audits.empty()) {
    int violations = 0;
    double worst = 0.0;
    for (const AuditRecord& a : report.audits) {
      if (!a.ok) ++violations;
      worst = std::min(worst, a.slack / a.scale);
    }
    doc["decrease_audit"] = {{"steps", report.audits.size()},
                             {"violations", violations},
                             {"worst_relative_slack", worst}};
  }
  return doc.dump(2) + "\n";
}

void write_report_file(const std::filesystem::path& path,
                       const SolveReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("report: cannot write " + path.string());
  out << report_json_text(report);
}

}  // namespace wanopt
