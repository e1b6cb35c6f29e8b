#include "wanopt/generate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wanopt {

namespace {

// All draws go through these helpers so generated instances are identical
// across standard-library implementations.
double next_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t span) {
  const std::uint64_t limit = span * (UINT64_MAX / span);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % span;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(
                  rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = next_u01(rng);
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - next_u01(rng);  // (0, 1]
  const double u2 = next_u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double sample_empirical(std::mt19937_64& rng,
                        const std::vector<std::pair<double, double>>& cdf) {
  const double u = next_u01(rng);
  if (u <= cdf.front().second) return cdf.front().first;
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    if (u <= cdf[i].second) {
      const double p0 = cdf[i - 1].second, p1 = cdf[i].second;
      const double v0 = cdf[i - 1].first, v1 = cdf[i].first;
      const double w = (p1 > p0) ? (u - p0) / (p1 - p0) : 1.0;
      return v0 + w * (v1 - v0);
    }
  }
  return cdf.back().first;
}

void check_config(const GenConfig& cfg) {
  if (cfg.num_flows == 0 || cfg.num_links == 0) {
    throw std::invalid_argument("gen: flow and link counts must be positive");
  }
  if (cfg.paths_min < 1 || cfg.paths_max < cfg.paths_min) {
    throw std::invalid_argument("gen: invalid paths_per_flow range");
  }
  if (!(cfg.capacity_min_bps > 0.0) ||
      cfg.capacity_max_bps < cfg.capacity_min_bps) {
    throw std::invalid_argument("gen: invalid capacity range");
  }
  if (cfg.path_len_min < 1 || cfg.path_len_max < cfg.path_len_min) {
    throw std::invalid_argument("gen: invalid path length range");
  }
  if (static_cast<std::size_t>(cfg.path_len_min) > cfg.num_links) {
    throw std::invalid_argument(
        "gen: path length range exceeds the number of links");
  }
  if (cfg.subflows_min < 1 || cfg.subflows_max < cfg.subflows_min) {
    throw std::invalid_argument("gen: invalid subflow count range");
  }
  if (cfg.cap_choices.empty()) {
    throw std::invalid_argument("gen: cardinality cap choices are empty");
  }
  double weight = 0.0;
  for (const auto& [cap, w] : cfg.cap_choices) {
    if (cap < 1 || w < 0.0) {
      throw std::invalid_argument("gen: invalid cardinality cap choice");
    }
    weight += w;
  }
  if (!(weight > 0.0)) {
    throw std::invalid_argument("gen: cap choice weights sum to zero");
  }
  if (cfg.size_dist == SizeDistribution::kEmpirical) {
    if (cfg.empirical_cdf.size() < 2) {
      throw std::invalid_argument("gen: empirical CDF needs at least 2 rows");
    }
    for (std::size_t i = 0; i < cfg.empirical_cdf.size(); ++i) {
      const auto& [v, p] = cfg.empirical_cdf[i];
      if (!(v > 0.0) || p < 0.0 || p > 1.0) {
        throw std::invalid_argument("gen: empirical CDF row out of range");
      }
      if (i > 0 && (v < cfg.empirical_cdf[i - 1].first ||
                    p < cfg.empirical_cdf[i - 1].second)) {
        throw std::invalid_argument("gen: empirical CDF must be ascending");
      }
    }
    if (cfg.empirical_cdf.back().second < 1.0 - 1e-12) {
      throw std::invalid_argument("gen: empirical CDF must end at probability 1");
    }
  }
  if (cfg.target_total_paths > 0) {
    const std::size_t lo = cfg.num_flows * static_cast<std::size_t>(cfg.paths_min);
    const std::size_t hi = cfg.num_flows * static_cast<std::size_t>(cfg.paths_max);
    if (cfg.target_total_paths < lo || cfg.target_total_paths > hi) {
      throw std::invalid_argument(
          "gen: target_total_paths unreachable for the paths_per_flow range");
    }
  }
}

}  // namespace

ProblemInstance generate_instance(const GenConfig& cfg) {
  check_config(cfg);
  std::mt19937_64 rng(cfg.seed);

  ProblemInstance inst;
  inst.alpha = cfg.alpha;
  inst.beta = cfg.beta;

  inst.capacities.resize(cfg.num_links);
  for (double& c : inst.capacities) {
    c = log_uniform(rng, cfg.capacity_min_bps, cfg.capacity_max_bps);
  }

  // Path counts, optionally pinned to an exact total by clamping the later
  // draws to the still-feasible range.
  std::vector<int> path_counts(cfg.num_flows);
  if (cfg.target_total_paths == 0) {
    for (int& p : path_counts) {
      p = uniform_int(rng, cfg.paths_min, cfg.paths_max);
    }
  } else {
    long long remaining = static_cast<long long>(cfg.target_total_paths);
    for (std::size_t k = 0; k < cfg.num_flows; ++k) {
      const long long left = static_cast<long long>(cfg.num_flows - 1 - k);
      const int lo = static_cast<int>(
          std::max<long long>(cfg.paths_min, remaining - left * cfg.paths_max));
      const int hi = static_cast<int>(
          std::min<long long>(cfg.paths_max, remaining - left * cfg.paths_min));
      path_counts[k] = uniform_int(rng, lo, hi);
      remaining -= path_counts[k];
    }
  }

  const int len_cap = std::min(cfg.path_len_max,
                               static_cast<int>(cfg.num_links));
  std::vector<std::size_t> link_pool(cfg.num_links);
  for (std::size_t l = 0; l < cfg.num_links; ++l) link_pool[l] = l;

  double total_cap_weight = 0.0;
  for (const auto& [cap, w] : cfg.cap_choices) total_cap_weight += w;

  for (std::size_t k = 0; k < cfg.num_flows; ++k) {
    std::vector<std::vector<std::size_t>> flow_paths;
    flow_paths.reserve(path_counts[k]);
    for (int i = 0; i < path_counts[k]; ++i) {
      const int len = uniform_int(rng, cfg.path_len_min, len_cap);
      // Partial Fisher-Yates over the persistent pool: the first `len`
      // entries after swapping are a uniform distinct sample.
      for (int j = 0; j < len; ++j) {
        const std::size_t swap_at =
            j + uniform_index(rng, cfg.num_links - j);
        std::swap(link_pool[j], link_pool[swap_at]);
      }
      flow_paths.emplace_back(link_pool.begin(), link_pool.begin() + len);
    }
    inst.paths.push_back(std::move(flow_paths));

    double pick = next_u01(rng) * total_cap_weight;
    int cap = cfg.cap_choices.back().first;
    for (const auto& [choice, w] : cfg.cap_choices) {
      if (pick < w) {
        cap = choice;
        break;
      }
      pick -= w;
    }
    inst.cardinality_caps.push_back(std::min(cap, path_counts[k]));

    const int subflows = uniform_int(rng, cfg.subflows_min, cfg.subflows_max);
    double size = 0.0;
    for (int j = 0; j < subflows; ++j) {
      switch (cfg.size_dist) {
        case SizeDistribution::kLogNormal:
          size += std::exp(cfg.lognormal_log_mean +
                           cfg.lognormal_log_sigma * standard_normal(rng));
          break;
        case SizeDistribution::kPareto:
          size += cfg.pareto_scale_bits *
                  std::pow(1.0 - next_u01(rng), -1.0 / cfg.pareto_shape);
          break;
        case SizeDistribution::kEmpirical:
          size += sample_empirical(rng, cfg.empirical_cdf);
          break;
      }
    }
    inst.flow_sizes.push_back(size);
  }

  finalize_instance(inst);
  return inst;
}

std::vector<std::pair<double, double>> load_cdf_table(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cdf: cannot open " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream is(line);
    double value = 0.0, prob = 0.0;
    if (!(is >> value)) continue;  // blank line
    if (!(is >> prob)) {
      throw std::runtime_error("cdf: line " + std::to_string(line_no) +
                               ": expected two columns");
    }
    rows.emplace_back(value, prob);
  }
  if (rows.size() < 2) throw std::runtime_error("cdf: needs at least 2 rows");
  return rows;
}

}  // namespace wanopt
