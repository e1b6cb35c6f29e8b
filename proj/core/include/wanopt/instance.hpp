// Problem instance: flows with candidate paths over capacitated links,
// objective weights, instance file I/O, and the four performance metrics.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wanopt/routing.hpp"

namespace wanopt {

/// Concatenated per-path rate vector x (bits/sec), grouped by flow blocks.
struct Allocation {
  std::vector<double> rates;

  std::size_t size() const { return rates.size(); }
};

struct ProblemInstance {
  std::size_t num_flows = 0;   ///< K
  std::size_t num_links = 0;   ///< L
  std::size_t total_paths = 0; ///< P

  std::vector<std::size_t> paths_per_flow;  ///< P_k, length K
  std::vector<std::size_t> block_offset;    ///< length K+1, prefix sums of P_k

  /// paths[k][i]: 0-based link indices traversed by path i of flow k.
  std::vector<std::vector<std::vector<std::size_t>>> paths;
  RoutingMatrix routing;  ///< derived from paths

  std::vector<double> capacities;   ///< c, bits/sec, length L
  std::vector<double> flow_sizes;   ///< s, bits, length K
  std::vector<int> cardinality_caps;  ///< w, 1 <= w_k <= P_k

  double alpha = 0.0;  ///< load weight (nonnegative)
  double beta = 0.0;   ///< fairness weight (positive)

  /// External identifiers preserved from the instance file (files use ids;
  /// everything in-process is 0-based dense indices).
  std::vector<std::int64_t> link_ids;
  std::vector<std::int64_t> flow_ids;

  /// Non-fatal findings recorded at load time (e.g. duplicate paths).
  std::vector<std::string> warnings;

  std::span<const double> flow_block(const Allocation& x, std::size_t k) const {
    return {x.rates.data() + block_offset[k], paths_per_flow[k]};
  }
  std::span<double> flow_block(Allocation& x, std::size_t k) const {
    return {x.rates.data() + block_offset[k], paths_per_flow[k]};
  }
};

/// Rebuilds derived fields (block offsets, routing matrix) from paths and
/// checks every invariant; throws std::runtime_error naming the offending
/// field and index.
void finalize_instance(ProblemInstance& inst);

/// Reads and validates an instance file (JSON; schema in docs/).
ProblemInstance load_instance(const std::filesystem::path& path);

/// Canonical serialized form: fixed key order, sorted ids, round-trip exact
/// numbers. load(save(inst)) reproduces the same canonical text.
std::string canonical_instance_text(const ProblemInstance& inst);
void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path);

/// Parses an instance from in-memory text (same schema as load_instance).
ProblemInstance parse_instance_text(const std::string& text);

struct Metrics {
  double delay = 0.0;     ///< sum_k s_k / ||x_k||_1, seconds
  double fairness = 0.0;  ///< beta * sum_k log ||x_k||_1
  double load = 0.0;      ///< max_l (R x)_l / c_l
  double obj = 0.0;       ///< delay - fairness + alpha * load
};

/// Evaluates the four performance measures; every flow must carry positive
/// total rate (throws std::domain_error naming the flow otherwise).
Metrics compute_metrics(const ProblemInstance& inst, const Allocation& x);

}  // namespace wanopt
