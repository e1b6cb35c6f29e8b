#include "wanopt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wanopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error(msg);
}

std::string field(const char* name, std::size_t index) {
  std::ostringstream os;
  os << name << "[" << index << "]";
  return os.str();
}

}  // namespace

void finalize_instance(ProblemInstance& inst) {
  inst.num_flows = inst.paths.size();
  inst.num_links = inst.capacities.size();

  if (inst.num_flows == 0) fail("flows: instance has no flows");
  if (inst.num_links == 0) fail("links: instance has no links");
  if (inst.flow_sizes.size() != inst.num_flows) {
    fail("flow_sizes: length does not match number of flows");
  }
  if (inst.cardinality_caps.size() != inst.num_flows) {
    fail("cardinality_caps: length does not match number of flows");
  }
  if (inst.link_ids.empty()) {
    inst.link_ids.resize(inst.num_links);
    for (std::size_t l = 0; l < inst.num_links; ++l) {
      inst.link_ids[l] = static_cast<std::int64_t>(l) + 1;
    }
  }
  if (inst.flow_ids.empty()) {
    inst.flow_ids.resize(inst.num_flows);
    for (std::size_t k = 0; k < inst.num_flows; ++k) {
      inst.flow_ids[k] = static_cast<std::int64_t>(k) + 1;
    }
  }

  inst.paths_per_flow.resize(inst.num_flows);
  inst.block_offset.assign(inst.num_flows + 1, 0);
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    inst.paths_per_flow[k] = inst.paths[k].size();
    inst.block_offset[k + 1] = inst.block_offset[k] + inst.paths[k].size();
    if (inst.paths[k].empty()) {
      fail(field("flows", k) + ".paths: flow has no paths");
    }
  }
  inst.total_paths = inst.block_offset[inst.num_flows];

  for (std::size_t l = 0; l < inst.num_links; ++l) {
    if (!(inst.capacities[l] > 0.0) || !std::isfinite(inst.capacities[l])) {
      fail(field("links", l) + ".capacity_bps: capacity must be positive");
    }
  }
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    if (!(inst.flow_sizes[k] > 0.0) || !std::isfinite(inst.flow_sizes[k])) {
      fail(field("flows", k) + ".size_bits: flow size must be positive");
    }
    const int cap = inst.cardinality_caps[k];
    if (cap < 1) {
      fail(field("flows", k) + ".cardinality_cap: cap must be at least 1");
    }
    if (static_cast<std::size_t>(cap) > inst.paths_per_flow[k]) {
      fail(field("flows", k) +
           ".cardinality_cap: cardinality cap exceeds path count");
    }
  }
  if (inst.alpha < 0.0 || !std::isfinite(inst.alpha)) {
    fail("weights.alpha: load weight must be nonnegative");
  }
  if (!(inst.beta > 0.0) || !std::isfinite(inst.beta)) {
    fail("weights.beta: fairness weight must be positive");
  }

  // Per-path checks: at least one link, no repeated link inside one path
  // (entries of the incidence matrix are 0/1), duplicate path link-sets
  // within a flow are legal but recorded.
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    std::map<std::vector<std::size_t>, std::size_t> seen;
    for (std::size_t i = 0; i < inst.paths[k].size(); ++i) {
      const auto& path = inst.paths[k][i];
      if (path.empty()) {
        fail(field("flows", k) + ".paths[" + std::to_string(i) +
             "]: path traverses no link");
      }
      std::vector<std::size_t> sorted(path);
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t j = 0; j < sorted.size(); ++j) {
        if (sorted[j] >= inst.num_links) {
          fail(field("flows", k) + ".paths[" + std::to_string(i) +
               "]: unknown link");
        }
        if (j > 0 && sorted[j] == sorted[j - 1]) {
          fail(field("flows", k) + ".paths[" + std::to_string(i) +
               "]: link listed twice in one path");
        }
      }
      auto [it, inserted] = seen.emplace(std::move(sorted), i);
      if (!inserted) {
        std::ostringstream os;
        os << "flows[" << k << "]: paths " << it->second << " and " << i
           << " traverse the same link set";
        inst.warnings.push_back(os.str());
      }
    }
  }

  inst.routing = RoutingMatrix::from_paths(inst.num_links, inst.paths);
}

namespace {

ProblemInstance instance_from_json(const json& doc) {
  ProblemInstance inst;
  if (!doc.is_object()) fail("instance: top-level document must be an object");
  if (!doc.contains("links") || !doc["links"].is_array()) {
    fail("links: missing or not an array");
  }
  if (!doc.contains("flows") || !doc["flows"].is_array()) {
    fail("flows: missing or not an array");
  }
  if (!doc.contains("weights") || !doc["weights"].is_object()) {
    fail("weights: missing or not an object");
  }

  std::map<std::int64_t, std::size_t> link_index;
  for (std::size_t l = 0; l < doc["links"].size(); ++l) {
    const auto& link = doc["links"][l];
    if (!link.contains("id") || !link["id"].is_number_integer()) {
      fail(field("links", l) + ".id: missing integer id");
    }
    if (!link.contains("capacity_bps") || !link["capacity_bps"].is_number()) {
      fail(field("links", l) + ".capacity_bps: missing number");
    }
    const std::int64_t id = link["id"].get<std::int64_t>();
    if (!link_index.emplace(id, l).second) {
      fail(field("links", l) + ".id: duplicate link id");
    }
    inst.link_ids.push_back(id);
    inst.capacities.push_back(link["capacity_bps"].get<double>());
  }

  std::set<std::int64_t> flow_ids;
  for (std::size_t k = 0; k < doc["flows"].size(); ++k) {
    const auto& flow = doc["flows"][k];
    if (!flow.contains("id") || !flow["id"].is_number_integer()) {
      fail(field("flows", k) + ".id: missing integer id");
    }
    if (!flow.contains("size_bits") || !flow["size_bits"].is_number()) {
      fail(field("flows", k) + ".size_bits: missing number");
    }
    if (!flow.contains("cardinality_cap") ||
        !flow["cardinality_cap"].is_number_integer()) {
      fail(field("flows", k) + ".cardinality_cap: missing integer");
    }
    if (!flow.contains("paths") || !flow["paths"].is_array()) {
      fail(field("flows", k) + ".paths: missing array");
    }
    const std::int64_t id = flow["id"].get<std::int64_t>();
    if (!flow_ids.insert(id).second) {
      fail(field("flows", k) + ".id: duplicate flow id");
    }
    inst.flow_ids.push_back(id);
    inst.flow_sizes.push_back(flow["size_bits"].get<double>());
    inst.cardinality_caps.push_back(flow["cardinality_cap"].get<int>());

    std::vector<std::vector<std::size_t>> flow_paths;
    for (std::size_t i = 0; i < flow["paths"].size(); ++i) {
      const auto& path = flow["paths"][i];
      if (!path.is_array()) {
        fail(field("flows", k) + ".paths[" + std::to_string(i) +
             "]: not an array of link ids");
      }
      std::vector<std::size_t> links;
      for (const auto& entry : path) {
        if (!entry.is_number_integer()) {
          fail(field("flows", k) + ".paths[" + std::to_string(i) +
               "]: link ids must be integers");
        }
        auto it = link_index.find(entry.get<std::int64_t>());
        if (it == link_index.end()) {
          fail(field("flows", k) + ".paths[" + std::to_string(i) +
               "]: unknown link id " + entry.dump());
        }
        links.push_back(it->second);
      }
      flow_paths.push_back(std::move(links));
    }
    inst.paths.push_back(std::move(flow_paths));
  }

  const auto& weights = doc["weights"];
  if (!weights.contains("alpha") || !weights["alpha"].is_number()) {
    fail("weights.alpha: missing number");
  }
  if (!weights.contains("beta") || !weights["beta"].is_number()) {
    fail("weights.beta: missing number");
  }
  inst.alpha = weights["alpha"].get<double>();
  inst.beta = weights["beta"].get<double>();

  finalize_instance(inst);
  return inst;
}

}  // namespace

ProblemInstance parse_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("instance: parse failure: ") + e.what());
  }
  return instance_from_json(doc);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("instance: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str());
}

std::string canonical_instance_text(const ProblemInstance& inst) {
  // nlohmann objects keep keys sorted, which pins the canonical key order;
  // ids are emitted in index order, numbers in shortest round-trip form.
  json doc;
  json links = json::array();
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    links.push_back({{"capacity_bps", inst.capacities[l]},
                     {"id", inst.link_ids[l]}});
  }
  doc["links"] = std::move(links);
  json flows = json::array();
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    json paths = json::array();
    for (const auto& path : inst.paths[k]) {
      json ids = json::array();
      for (std::size_t link : path) ids.push_back(inst.link_ids[link]);
      paths.push_back(std::move(ids));
    }
    flows.push_back({{"cardinality_cap", inst.cardinality_caps[k]},
                     {"id", inst.flow_ids[k]},
                     {"paths", std::move(paths)},
                     {"size_bits", inst.flow_sizes[k]}});
  }
  doc["flows"] = std::move(flows);
  doc["weights"] = {{"alpha", inst.alpha}, {"beta", inst.beta}};
  return doc.dump(2) + "\n";
}

void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("instance: cannot write " + path.string());
  out << canonical_instance_text(inst);
}

Metrics compute_metrics(const ProblemInstance& inst, const Allocation& x) {
  if (x.size() != inst.total_paths) {
    throw std::invalid_argument("compute_metrics: allocation length mismatch");
  }
  Metrics m;
  for (std::size_t k = 0; k < inst.num_flows; ++k) {
    double total = 0.0;
    for (double v : inst.flow_block(x, k)) total += v;
    if (!(total > 0.0)) {
      throw std::domain_error("compute_metrics: flow " + std::to_string(k) +
                              " has zero total rate");
    }
    m.delay += inst.flow_sizes[k] / total;
    m.fairness += std::log(total);
  }
  m.fairness *= inst.beta;
  for (std::size_t l = 0; l < inst.num_links; ++l) {
    const double ratio = inst.routing.row_dot(l, x.rates) / inst.capacities[l];
    if (ratio > m.load) m.load = ratio;
  }
  m.obj = m.delay - m.fairness + inst.alpha * m.load;
  return m;
}

}  // namespace wanopt
