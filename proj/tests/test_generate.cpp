#include "wanopt/generate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_support.hpp"
#include "wanopt/instance.hpp"

using namespace wanopt;

TEST_CASE("default configuration respects its documented ranges") {
  GenConfig cfg;
  cfg.seed = 2026;
  const ProblemInstance inst = generate_instance(cfg);
  CHECK(inst.num_flows == 561);
  CHECK(inst.num_links == 460);
  CHECK(inst.total_paths == 19751);
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    CHECK(inst.paths_per_flow[k] >= 4);
    CHECK(inst.paths_per_flow[k] <= 100);
    CHECK(inst.cardinality_caps[k] >= 1);
    CHECK(inst.cardinality_caps[k] <= 3);
    CHECK(inst.flow_sizes[k] > 0.0);
  }
  for (double c : inst.capacities) {
    CHECK(c >= 1.024e9);
    CHECK(c <= 2.048e11);
  }
}

TEST_CASE("same seed reproduces the instance byte for byte") {
  auto cfg = testsupport::desk_config(555);
  const std::string once = canonical_instance_text(generate_instance(cfg));
  const std::string twice = canonical_instance_text(generate_instance(cfg));
  CHECK(once == twice);
  cfg.seed = 556;
  CHECK(canonical_instance_text(generate_instance(cfg)) != once);
}

TEST_CASE("generated instances pass loader validation") {
  namespace fs = std::filesystem;
  const ProblemInstance inst = generate_instance(testsupport::desk_config(777));
  const fs::path path = fs::temp_directory_path() / "wanopt_genio.json";
  save_instance(inst, path);
  const ProblemInstance loaded = load_instance(path);
  CHECK(loaded.total_paths == inst.total_paths);
  CHECK(loaded.capacities == inst.capacities);
  fs::remove(path);
}

TEST_CASE("empirical CDF sampling matches the table (KS distance)") {
  // Piecewise-linear CDF anchored at probability 0.
  const std::vector<std::pair<double, double>> cdf = {
      {100.0, 0.0}, {500.0, 0.35}, {2000.0, 0.8}, {10000.0, 1.0}};
  GenConfig cfg;
  cfg.seed = 99;
  cfg.num_flows = 10000;  // one sub-flow per flow: 10^4 direct samples
  cfg.num_links = 4;
  cfg.paths_min = 1;
  cfg.paths_max = 1;
  cfg.target_total_paths = 0;
  cfg.path_len_min = 1;
  cfg.path_len_max = 1;
  cfg.subflows_min = 1;
  cfg.subflows_max = 1;
  cfg.size_dist = SizeDistribution::kEmpirical;
  cfg.empirical_cdf = cdf;
  const ProblemInstance inst = generate_instance(cfg);

  std::vector<double> samples(inst.flow_sizes);
  std::sort(samples.begin(), samples.end());
  const auto cdf_at = [&](double v) {
    if (v <= cdf.front().first) return cdf.front().second;
    for (std::size_t i = 1; i < cdf.size(); ++i) {
      if (v <= cdf[i].first) {
        const double w =
            (v - cdf[i - 1].first) / (cdf[i].first - cdf[i - 1].first);
        return cdf[i - 1].second + w * (cdf[i].second - cdf[i - 1].second);
      }
    }
    return 1.0;
  };
  double ks = 0.0;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf_at(samples[i]);
    ks = std::max(ks, std::fabs(f - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
  }
  CHECK(ks <= 0.05);
}

TEST_CASE("path-count distribution is close to uniform (chi-square)") {
  GenConfig cfg = testsupport::desk_config(123);
  cfg.num_flows = 10000;
  cfg.num_links = 12;
  cfg.paths_min = 4;
  cfg.paths_max = 10;
  cfg.subflows_min = 1;
  cfg.subflows_max = 1;
  const ProblemInstance inst = generate_instance(cfg);
  const int bins = 7;
  std::vector<int> counts(bins, 0);
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    ++counts[inst.paths_per_flow[k] - 4];
  }
  const double expected = 10000.0 / bins;
  double chi_sq = 0.0;
  for (int c : counts) {
    chi_sq += (c - expected) * (c - expected) / expected;
  }
  const double df = bins - 1;
  CHECK(chi_sq < df + 5.0 * std::sqrt(2.0 * df));
}

TEST_CASE("pareto sub-flow sizes stay above the scale parameter") {
  GenConfig cfg = testsupport::desk_config(321);
  cfg.size_dist = SizeDistribution::kPareto;
  cfg.pareto_scale_bits = 1000.0;
  cfg.subflows_min = 1;
  cfg.subflows_max = 1;
  const ProblemInstance inst = generate_instance(cfg);
  for (double s : inst.flow_sizes) CHECK(s >= 1000.0);
}

TEST_CASE("impossible configurations are rejected") {
  GenConfig cfg = testsupport::desk_config(1);
  cfg.path_len_min = 50;  // exceeds the 10-link topology
  cfg.path_len_max = 60;
  CHECK_THROWS_AS(generate_instance(cfg), std::invalid_argument);

  cfg = testsupport::desk_config(1);
  cfg.paths_min = 5;
  cfg.paths_max = 4;
  CHECK_THROWS_AS(generate_instance(cfg), std::invalid_argument);

  cfg = testsupport::desk_config(1);
  cfg.target_total_paths = 1;  // unreachable below flows * paths_min
  CHECK_THROWS_AS(generate_instance(cfg), std::invalid_argument);

  cfg = testsupport::desk_config(1);
  cfg.cap_choices = {};
  CHECK_THROWS_AS(generate_instance(cfg), std::invalid_argument);
}

TEST_CASE("CDF table loader parses delimited rows") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "wanopt_cdf.txt";
  {
    std::ofstream out(path);
    out << "# value cumprob\n";
    out << "100 0.0\n";
    out << "500,0.5\n";
    out << "\n";
    out << "900\t1.0\n";
  }
  const auto rows = load_cdf_table(path);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].first == 500.0);
  CHECK(rows[1].second == 0.5);
  fs::remove(path);
}
