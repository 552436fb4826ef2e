#include "dhg/sampling.hpp"

#include <algorithm>
#include <sstream>

#include "dhg/error.hpp"

namespace dhg {

MetapathInstanceSet sample_instances(const HeteroGraph& graph, int32_t metapath_id, int64_t v,
                                     int64_t walks, Rng& rng) {
  const auto& paths = graph.metapaths();
  if (metapath_id < 0 || metapath_id >= static_cast<int32_t>(paths.size()))
    throw ConfigError("sample_instances: invalid metapath id " + std::to_string(metapath_id));
  if (walks < 1) throw ConfigError("sample_instances: walks must be >= 1");
  const Metapath& m = paths[static_cast<size_t>(metapath_id)];
  const std::vector<int32_t> types = metapath_type_check(graph.schema(), m);
  if (types.front() != types.back())
    throw ConfigError("metapath '" + m.name + "' is not same-type: starts at '" +
                      graph.schema().node_type(types.front()).name + "', ends at '" +
                      graph.schema().node_type(types.back()).name + "'");
  if (v < 0 || v >= graph.num_nodes(types.back()))
    throw ConfigError("sample_instances: node index " + std::to_string(v) +
                      " out of range for type '" + graph.schema().node_type(types.back()).name +
                      "'");

  MetapathInstanceSet out;
  out.target = v;
  out.metapath = metapath_id;
  const auto k = static_cast<int64_t>(m.steps.size());
  std::vector<int64_t> walk(static_cast<size_t>(k) + 1);
  for (int64_t w = 0; w < walks; ++w) {
    walk[static_cast<size_t>(k)] = v;  // destination slot
    bool dead = false;
    // traverse the metapath back to front, flipping each step
    for (int64_t j = k - 1; j >= 0; --j) {
      const MetapathStep& step = m.steps[static_cast<size_t>(j)];
      const int64_t from = walk[static_cast<size_t>(j) + 1];
      const auto nbrs =
          graph.neighbors(types[static_cast<size_t>(j) + 1], from, step.edge_type,
                          flip(step.dir));
      if (nbrs.empty()) {
        dead = true;
        break;
      }
      walk[static_cast<size_t>(j)] =
          nbrs[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(nbrs.size()) - 1))];
    }
    if (dead)
      ++out.discarded;
    else
      out.instances.push_back(walk);
  }
  return out;
}

const MetapathInstanceSet& Batch::instance_set(int64_t node, int32_t metapath) const {
  auto it = instances.find({node, metapath});
  if (it == instances.end())
    throw std::logic_error("batch is missing instance set for node " + std::to_string(node) +
                           ", metapath " + std::to_string(metapath));
  return it->second;
}

const SenSample& Batch::sen(int64_t node) const {
  auto it = sens.find(node);
  if (it == sens.end())
    throw std::logic_error("batch is missing the ego-net sample for node " +
                           std::to_string(node));
  return it->second;
}

Batch build_batch(const HeteroGraph& graph, const SenTemplate& tmpl,
                  const std::vector<int64_t>& targets, int32_t layers, const SampleConfig& cfg,
                  Rng& rng) {
  if (targets.empty()) throw ConfigError("build_batch: empty target list");
  if (layers < 0) throw ConfigError("build_batch: negative layer count");
  const int32_t tt = graph.target_type();
  if (tt < 0) throw ConfigError("build_batch: dataset has no target type");
  for (int64_t t : targets)
    if (t < 0 || t >= graph.num_nodes(tt))
      throw ConfigError("build_batch: target index " + std::to_string(t) + " out of range");

  Batch b;
  b.layers = layers;
  b.targets = targets;
  b.frontiers.resize(static_cast<size_t>(layers) + 1);

  std::vector<int64_t> frontier = targets;
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  b.frontiers[static_cast<size_t>(layers)] = frontier;

  const auto num_paths = static_cast<int32_t>(graph.metapaths().size());
  for (int32_t l = layers; l >= 1; --l) {
    std::vector<int64_t> next = frontier;
    for (int64_t u : frontier) {
      for (int32_t m = 0; m < num_paths; ++m) {
        auto key = std::make_pair(u, m);
        auto it = b.instances.find(key);
        if (it == b.instances.end()) {
          it = b.instances.emplace(key, sample_instances(graph, m, u, cfg.walks, rng)).first;
          ++b.instance_pairs;
          if (it->second.instances.empty()) ++b.empty_instance_sets;
        }
        for (const auto& inst : it->second.instances) next.push_back(inst.front());
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
    b.frontiers[static_cast<size_t>(l) - 1] = frontier;
  }

  for (int64_t u : b.frontiers[0]) b.sens.emplace(u, instantiate_sen(graph, tmpl, u, cfg.fanout, rng));
  return b;
}

std::string describe(const Batch& b, const HeteroGraph& graph) {
  std::ostringstream os;
  os << "batch: " << b.targets.size() << " targets, " << b.layers << " layers\n";
  for (size_t l = 0; l < b.frontiers.size(); ++l)
    os << "  frontier " << l << ": " << b.frontiers[l].size() << " nodes\n";
  os << "  instance sets: " << b.instance_pairs << " (" << b.empty_instance_sets << " empty)\n";
  int64_t total_occ = 0;
  for (const auto& [node, sen] : b.sens) total_occ += static_cast<int64_t>(sen.occs.size());
  os << "  ego-net samples: " << b.sens.size() << ", total occurrences " << total_occ << "\n";
  for (const auto& [key, set] : b.instances) {
    os << "  node " << key.first << " x " << graph.metapaths()[static_cast<size_t>(key.second)].name
       << ": " << set.instances.size() << " instances";
    if (set.discarded > 0) os << " (" << set.discarded << " discarded)";
    os << "\n";
  }
  return os.str();
}

const std::vector<int64_t>& RgcnBatch::neighbors_of(TypedNode v, int32_t edge_type,
                                                    Direction dir) const {
  auto it = nbrs.find({v, edge_type, dir});
  if (it == nbrs.end())
    throw std::logic_error("relational batch is missing neighbors for node " +
                           std::to_string(v.index));
  return it->second;
}

RgcnBatch build_rgcn_batch(const HeteroGraph& graph, const std::vector<int64_t>& targets,
                           int32_t layers, const SampleConfig& cfg, Rng& rng) {
  if (targets.empty()) throw ConfigError("build_rgcn_batch: empty target list");
  if (layers < 1) throw ConfigError("build_rgcn_batch: layer count must be >= 1");
  const int32_t tt = graph.target_type();
  if (tt < 0) throw ConfigError("build_rgcn_batch: dataset has no target type");

  RgcnBatch b;
  b.layers = layers;
  b.targets = targets;
  b.frontiers.resize(static_cast<size_t>(layers) + 1);

  std::vector<TypedNode> frontier;
  for (int64_t t : targets) {
    if (t < 0 || t >= graph.num_nodes(tt))
      throw ConfigError("build_rgcn_batch: target index " + std::to_string(t) + " out of range");
    frontier.push_back({tt, t});
  }
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  b.frontiers[static_cast<size_t>(layers)] = frontier;

  for (int32_t l = layers; l >= 1; --l) {
    std::vector<TypedNode> next = frontier;
    for (TypedNode v : frontier) {
      for (const auto& [edge, dir] : graph.schema().incident(v.type)) {
        auto key = std::make_tuple(v, edge, dir);
        auto it = b.nbrs.find(key);
        if (it == b.nbrs.end()) {
          const auto all = graph.neighbors(v.type, v.index, edge, dir);
          std::vector<int64_t> sample;
          const auto n = static_cast<int64_t>(all.size());
          if (n <= cfg.fanout) {
            sample.assign(all.begin(), all.end());
          } else {
            for (int64_t pick : rng.sample_without_replacement(n, cfg.fanout))
              sample.push_back(all[static_cast<size_t>(pick)]);
          }
          it = b.nbrs.emplace(key, std::move(sample)).first;
        }
        const int32_t other = graph.schema().step_to(edge, dir);
        for (int64_t u : it->second) next.push_back({other, u});
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
    b.frontiers[static_cast<size_t>(l) - 1] = frontier;
  }
  return b;
}

}  // namespace dhg
