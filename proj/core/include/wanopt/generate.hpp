// Seeded synthetic instance generator. Defaults mirror the shape of the
// production WAN workload the solvers target: a few hundred aggregate
// flows, 4-100 candidate paths each, capacities spanning two orders of
// magnitude, and per-flow path budgets drawn from a small cap set.
#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "wanopt/instance.hpp"

namespace wanopt {

enum class SizeDistribution { kLogNormal, kPareto, kEmpirical };

struct GenConfig {
  std::size_t num_flows = 561;
  std::size_t num_links = 460;

  int paths_min = 4;
  int paths_max = 100;
  /// When nonzero, per-flow path counts are drawn uniformly subject to
  /// summing exactly to this total (the tail of the sequence is range-
  /// clamped, so the marginal distribution is only approximately uniform).
  std::size_t target_total_paths = 19751;

  double capacity_min_bps = 1.024e9;   ///< drawn log-uniformly
  double capacity_max_bps = 2.048e11;

  int path_len_min = 2;
  int path_len_max = 6;

  /// Each flow aggregates N sub-flows, N uniform in this range; its size is
  /// the sum of the sub-flow sizes.
  int subflows_min = 1000;
  int subflows_max = 10000;

  SizeDistribution size_dist = SizeDistribution::kLogNormal;
  double lognormal_log_mean = 13.6;  ///< ln(bits); exp(13.6) ~ 1e5 bytes
  double lognormal_log_sigma = 1.5;
  double pareto_scale_bits = 1e5;
  double pareto_shape = 1.5;
  /// (value_bits, cumulative_probability) rows, ascending, last row at 1.
  std::vector<std::pair<double, double>> empirical_cdf;

  /// (cap, weight) choices for w_k; the draw is clamped to P_k.
  std::vector<std::pair<int, double>> cap_choices = {{1, 1.0}, {2, 1.0}, {3, 1.0}};

  double alpha = 500.0;
  double beta = 0.05;

  std::uint64_t seed = 0;
};

/// Deterministic under a fixed config and seed; the result always passes
/// instance validation. Throws std::invalid_argument on impossible
/// configurations (e.g. path length exceeding the link count).
ProblemInstance generate_instance(const GenConfig& cfg);

/// Two-column (value, cumulative probability) delimited text; '#' comments
/// and blank lines are skipped.
std::vector<std::pair<double, double>> load_cdf_table(
    const std::filesystem::path& path);

}  // namespace wanopt
