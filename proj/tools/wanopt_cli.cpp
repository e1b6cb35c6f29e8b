// Command-line front end: generate instances, run the solvers and the
// conditional-gradient baselines, compare schemes on one instance, and turn
// traces into plot-ready columns.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wanopt/admm.hpp"
#include "wanopt/frankwolfe.hpp"
#include "wanopt/generate.hpp"
#include "wanopt/instance.hpp"
#include "wanopt/report.hpp"

namespace fs = std::filesystem;
using namespace wanopt;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct SolverFlags {
  SolveOptions admm;
  FwOptions fw;
  std::string rho_schedule = "auto";
  std::string fw_step = "linesearch";
  std::optional<double> alpha_override;
  std::optional<double> beta_override;

  void apply() {
    if (rho_schedule == "adaptive") {
      admm.rho_schedule.kind = RhoSchedule::Kind::kAdaptive;
    } else if (rho_schedule == "increasing") {
      admm.rho_schedule.kind = RhoSchedule::Kind::kIncreasing;
    } else if (rho_schedule == "fixed") {
      admm.rho_schedule.kind = RhoSchedule::Kind::kFixed;
    } else {
      admm.rho_schedule.kind = RhoSchedule::Kind::kAuto;
    }
    fw.line_search = (fw_step != "diminishing");
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--alpha", flags.alpha_override,
                  "Override the instance load weight");
  cmd->add_option("--beta", flags.beta_override,
                  "Override the instance fairness weight");
  cmd->add_option("--rho0", flags.admm.rho0, "Initial penalty parameter");
  cmd->add_option("--mu-factor", flags.admm.mu_factor,
                  "mu = mu-factor * rho * ||R||^2 (must exceed 1)");
  cmd->add_option("--gamma", flags.admm.gamma,
                  "Multiplier step length on the convex path");
  cmd->add_option("--max-iters", flags.admm.max_iters, "Iteration budget");
  cmd->add_option("--eps-abs", flags.admm.eps_abs, "Convex absolute tolerance");
  cmd->add_option("--eps-rel", flags.admm.eps_rel, "Convex relative tolerance");
  cmd->add_option("--eps-tol1", flags.admm.eps_tol1,
                  "Non-convex residual tolerance");
  cmd->add_option("--eps-tol2", flags.admm.eps_tol2,
                  "Normalized capacity-violation tolerance");
  cmd->add_option("--rho-schedule", flags.rho_schedule,
                  "auto | adaptive | increasing | fixed")
      ->check(CLI::IsMember({"auto", "adaptive", "increasing", "fixed"}));
  cmd->add_option("--rho-factor", flags.admm.rho_schedule.factor,
                  "Increasing-schedule growth factor");
  cmd->add_option("--rho-period", flags.admm.rho_schedule.period,
                  "Increasing-schedule period (iterations)");
  cmd->add_flag("--audit", flags.admm.audit_decrease,
                "Evaluate the per-iteration decrease inequality");
  cmd->add_flag("--random-init", flags.admm.random_init,
                "Seeded random start instead of the deterministic one");
  cmd->add_option("--seed", flags.admm.seed, "Seed for --random-init");
  cmd->add_option("--fw-max-iters", flags.fw.max_iters,
                  "Conditional-gradient iteration budget");
  cmd->add_option("--fw-gap-tol", flags.fw.gap_rel_tol,
                  "Relative duality-gap stopping tolerance");
  cmd->add_option("--fw-step", flags.fw_step, "linesearch | diminishing")
      ->check(CLI::IsMember({"linesearch", "diminishing"}));
}

ProblemInstance load_with_overrides(const fs::path& path,
                                    const SolverFlags& flags) {
  ProblemInstance inst = load_instance(path);
  for (const std::string& w : inst.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (flags.alpha_override || flags.beta_override) {
    if (flags.alpha_override) inst.alpha = *flags.alpha_override;
    if (flags.beta_override) inst.beta = *flags.beta_override;
    finalize_instance(inst);
  }
  return inst;
}

bool cardinality_ok(const ProblemInstance& inst, const Allocation& x) {
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    int nonzeros = 0;
    for (double v : inst.flow_block(x, k)) {
      if (v != 0.0) ++nonzeros;
    }
    if (nonzeros > inst.cardinality_caps[k]) return false;
  }
  return true;
}

const std::vector<std::string> kAllSchemes = {
    "cvx-mopc", "fw", "fw-relaxed", "fw-projected", "fw-relaxed-projected",
    "mopc"};

SolveReport run_scheme(const std::string& scheme, const ProblemInstance& inst,
                       const SolverFlags& flags) {
  if (scheme == "num") return solve_num(inst, flags.admm);
  if (scheme == "mopc") return solve_mopc(inst, flags.admm);
  if (scheme == "cvx-mopc") {
    ProblemInstance lifted = inst;
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      lifted.cardinality_caps[k] = static_cast<int>(inst.paths_per_flow[k]);
    }
    return solve_mopc(lifted, flags.admm);
  }

  const bool relaxed_rows = scheme == "fw-relaxed" ||
                            scheme == "fw-relaxed-projected";
  const bool projected = scheme == "fw-projected" ||
                         scheme == "fw-relaxed-projected";
  if (scheme == "fw" || relaxed_rows || projected) {
    FwOptions fw = flags.fw;
    fw.cardinality_rows = relaxed_rows;
    SolveReport report = fw_solve(build_relaxed(inst), fw);
    if (projected) {
      report.final_x = project_cardinality(inst, report.final_x);
      inst.routing.multiply(report.final_x.rates, report.y_final);
      report.metrics = compute_metrics(inst, report.final_x);
    }
    return report;
  }
  throw CLI::ValidationError("--scheme", "unknown scheme " + scheme);
}

void write_error_record(const fs::path& out_dir, const std::string& scheme,
                        const std::string& message) {
  nlohmann::json doc;
  doc["error"] = message;
  doc["scheme"] = scheme;
  std::ofstream out(out_dir / "error.json", std::ios::binary);
  out << doc.dump(2) << "\n";
}

int run_solve(const fs::path& instance_path, const std::string& scheme,
              const fs::path& out_dir, SolverFlags& flags) {
  flags.apply();
  fs::create_directories(out_dir);
  const ProblemInstance inst = load_with_overrides(instance_path, flags);
  SolveReport report;
  try {
    report = run_scheme(scheme, inst, flags);
  } catch (const std::exception& e) {
    write_error_record(out_dir, scheme, e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  write_report_file(out_dir / "report.json", report);
  write_trace_file(out_dir / "trace.tsv", report);
  std::cout << scheme << ": " << to_string(report.status) << " after "
            << report.iterations << " iterations, obj=" << report.metrics.obj
            << " delay=" << report.metrics.delay
            << " fairness=" << report.metrics.fairness
            << " load=" << report.metrics.load << "\n";
  if (report.status == SolveStatus::kError) {
    write_error_record(out_dir, scheme, report.message);
    std::cerr << "error: " << report.message << "\n";
    return 2;
  }
  return 0;
}

int run_compare(const fs::path& instance_path,
                const std::vector<std::string>& schemes,
                const fs::path& out_dir, SolverFlags& flags) {
  flags.apply();
  fs::create_directories(out_dir);
  const ProblemInstance inst = load_with_overrides(instance_path, flags);

  std::ofstream summary(out_dir / "summary.tsv", std::ios::binary);
  summary << "scheme\tobj\tdelay\tfairness\tload\tmeets_cardinality\tstatus\n";
  int exit_code = 0;
  for (const std::string& scheme : schemes) {
    const fs::path scheme_dir = out_dir / scheme;
    fs::create_directories(scheme_dir);
    SolveReport report;
    try {
      report = run_scheme(scheme, inst, flags);
    } catch (const std::exception& e) {
      write_error_record(scheme_dir, scheme, e.what());
      std::cerr << scheme << ": error: " << e.what() << "\n";
      exit_code = 2;
      continue;
    }
    write_report_file(scheme_dir / "report.json", report);
    write_trace_file(scheme_dir / "trace.tsv", report);
    if (report.status == SolveStatus::kError) {
      write_error_record(scheme_dir, scheme, report.message);
      std::cerr << scheme << ": error: " << report.message << "\n";
      exit_code = 2;
      continue;
    }
    const Metrics& m = report.metrics;
    summary << scheme << '\t' << fmt(m.obj) << '\t' << fmt(m.delay) << '\t'
            << fmt(m.fairness) << '\t' << fmt(m.load) << '\t'
            << (cardinality_ok(inst, report.final_x) ? "yes" : "no") << '\t'
            << to_string(report.status) << '\n';
    std::cout << scheme << ": obj=" << m.obj << " delay=" << m.delay
              << " fairness=" << m.fairness << " load=" << m.load << " ("
              << to_string(report.status) << ")\n";
  }
  std::cout << "summary: " << (out_dir / "summary.tsv").string() << "\n";
  return exit_code;
}

int run_report(const fs::path& trace_path, const fs::path& out_dir) {
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot open " << trace_path << "\n";
    return 1;
  }
  fs::create_directories(out_dir);
  std::string header;
  if (!std::getline(in, header)) {
    std::cerr << "error: empty trace\n";
    return 1;
  }
  std::vector<std::string> names;
  {
    std::istringstream is(header);
    std::string name;
    while (std::getline(is, name, '\t')) names.push_back(name);
  }
  if (names.size() != 8 || names[0] != "iter") {
    std::cerr << "error: unrecognized trace header\n";
    return 1;
  }

  // Plot-ready columns: iteration index plus the convergence quantities.
  std::ofstream out(out_dir / "plot.tsv", std::ios::binary);
  out << names[0] << '\t' << names[3] << '\t' << names[4] << '\t' << names[5]
      << '\t' << names[6] << '\t' << names[7] << '\n';
  std::string line;
  std::string last;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(is, cell, '\t')) cells.push_back(cell);
    if (cells.size() != 8) {
      std::cerr << "error: malformed trace record\n";
      return 1;
    }
    out << cells[0] << '\t' << cells[3] << '\t' << cells[4] << '\t' << cells[5]
        << '\t' << cells[6] << '\t' << cells[7] << '\n';
    last = line;
    ++records;
  }
  std::cout << "wrote " << (out_dir / "plot.tsv").string() << " (" << records
            << " records)\n";
  if (!last.empty()) std::cout << "final record: " << last << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-path bandwidth allocation and path selection solvers"};
  app.require_subcommand(1);

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Generate a synthetic instance");
  GenConfig gen_cfg;
  std::string gen_out = "instance.json";
  std::string size_dist = "lognormal";
  std::string cdf_file;
  std::vector<int> cap_set;
  gen_cmd->add_option("--out", gen_out, "Output instance file");
  gen_cmd->add_option("--seed", gen_cfg.seed, "Generator seed");
  gen_cmd->add_option("--flows", gen_cfg.num_flows, "Number of flows");
  gen_cmd->add_option("--links", gen_cfg.num_links, "Number of links");
  gen_cmd->add_option("--paths-min", gen_cfg.paths_min, "Min paths per flow");
  gen_cmd->add_option("--paths-max", gen_cfg.paths_max, "Max paths per flow");
  gen_cmd->add_option("--target-paths", gen_cfg.target_total_paths,
                      "Pin the total path count (0 disables)");
  gen_cmd->add_option("--cap-min", gen_cfg.capacity_min_bps,
                      "Min link capacity (bits/sec)");
  gen_cmd->add_option("--cap-max", gen_cfg.capacity_max_bps,
                      "Max link capacity (bits/sec)");
  gen_cmd->add_option("--path-len-min", gen_cfg.path_len_min, "Min links per path");
  gen_cmd->add_option("--path-len-max", gen_cfg.path_len_max, "Max links per path");
  gen_cmd->add_option("--subflows-min", gen_cfg.subflows_min,
                      "Min sub-flows aggregated into one flow");
  gen_cmd->add_option("--subflows-max", gen_cfg.subflows_max,
                      "Max sub-flows aggregated into one flow");
  gen_cmd->add_option("--size-dist", size_dist,
                      "Sub-flow size distribution: lognormal | pareto | empirical")
      ->check(CLI::IsMember({"lognormal", "pareto", "empirical"}));
  gen_cmd->add_option("--cdf-file", cdf_file,
                      "Empirical CDF table (value cum_prob per line)");
  gen_cmd->add_option("--caps", cap_set,
                      "Cardinality cap choices, e.g. --caps 1 2 3");
  gen_cmd->add_option("--alpha", gen_cfg.alpha, "Load weight");
  gen_cmd->add_option("--beta", gen_cfg.beta, "Fairness weight");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one scheme on an instance");
  std::string solve_instance, solve_scheme = "mopc", solve_out = "out";
  SolverFlags solve_flags;
  solve_cmd->add_option("--instance", solve_instance, "Instance file")->required();
  solve_cmd
      ->add_option("--scheme", solve_scheme,
                   "num | mopc | cvx-mopc | fw | fw-relaxed | fw-projected | "
                   "fw-relaxed-projected")
      ->check(CLI::IsMember({"num", "mopc", "cvx-mopc", "fw", "fw-relaxed",
                             "fw-projected", "fw-relaxed-projected"}));
  solve_cmd->add_option("--out", solve_out, "Output directory");
  add_solver_flags(solve_cmd, solve_flags);

  // compare
  auto* cmp_cmd =
      app.add_subcommand("compare", "Run several schemes on one instance");
  std::string cmp_instance, cmp_out = "compare-out";
  std::vector<std::string> cmp_schemes = kAllSchemes;
  SolverFlags cmp_flags;
  cmp_cmd->add_option("--instance", cmp_instance, "Instance file")->required();
  cmp_cmd->add_option("--schemes", cmp_schemes, "Schemes to run");
  cmp_cmd->add_option("--out", cmp_out, "Output directory");
  add_solver_flags(cmp_cmd, cmp_flags);

  // report
  auto* rep_cmd =
      app.add_subcommand("report", "Convert a trace to plot-ready columns");
  std::string rep_trace, rep_out = "report-out";
  rep_cmd->add_option("--trace", rep_trace, "Trace file from solve/compare")
      ->required();
  rep_cmd->add_option("--out", rep_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      if (size_dist == "pareto") gen_cfg.size_dist = SizeDistribution::kPareto;
      if (size_dist == "empirical") {
        gen_cfg.size_dist = SizeDistribution::kEmpirical;
        if (cdf_file.empty()) {
          std::cerr << "error: --size-dist empirical requires --cdf-file\n";
          return 1;
        }
        gen_cfg.empirical_cdf = load_cdf_table(cdf_file);
      }
      if (!cap_set.empty()) {
        gen_cfg.cap_choices.clear();
        for (int cap : cap_set) gen_cfg.cap_choices.emplace_back(cap, 1.0);
      }
      const ProblemInstance inst = generate_instance(gen_cfg);
      save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << ": " << inst.num_flows << " flows, "
                << inst.num_links << " links, " << inst.total_paths
                << " paths\n";
      return 0;
    }
    if (solve_cmd->parsed()) {
      return run_solve(solve_instance, solve_scheme, solve_out, solve_flags);
    }
    if (cmp_cmd->parsed()) {
      return run_compare(cmp_instance, cmp_schemes, cmp_out, cmp_flags);
    }
    if (rep_cmd->parsed()) {
      return run_report(rep_trace, rep_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
