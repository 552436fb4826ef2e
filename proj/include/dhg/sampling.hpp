#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dhg/graph.hpp"
#include "dhg/rng.hpp"
#include "dhg/sen.hpp"

namespace dhg {

// Sampled metapath instances ending at one target node. Each instance is the
// full node sequence read source -> destination, so the last element is the
// target itself and the sequence length is steps + 1.
struct MetapathInstanceSet {
  int64_t target = -1;
  int32_t metapath = -1;  // index into HeteroGraph::metapaths()
  std::vector<std::vector<int64_t>> instances;
  int64_t discarded = 0;  // dead-end walks (completed + discarded == walks)
};

// Runs `walks` independent random walks from v along the reversed metapath,
// each step uniform over the valid typed neighbors; dead ends are discarded,
// completed walks recorded re-reversed so messages flow source -> v.
// Duplicate instances are kept. The metapath must be same-type.
MetapathInstanceSet sample_instances(const HeteroGraph& graph, int32_t metapath_id, int64_t v,
                                     int64_t walks, Rng& rng);

struct SampleConfig {
  int64_t walks = 20;
  int64_t fanout = 20;
};

// Self-contained mini-batch for the metapath model. frontiers[k] holds the
// mini-batch targets and frontiers[l-1] = frontiers[l] plus every sampled
// instance source at layer l, so each layer's inputs are always present.
// Instance sets are sampled once per (node, metapath) and reused across the
// layers that meet the node again.
struct Batch {
  int32_t layers = 0;
  std::vector<int64_t> targets;                 // as given, order preserved
  std::vector<std::vector<int64_t>> frontiers;  // l = 0..layers, each sorted unique
  std::map<std::pair<int64_t, int32_t>, MetapathInstanceSet> instances;
  std::map<int64_t, SenSample> sens;  // one per node in frontiers[0]
  int64_t empty_instance_sets = 0;    // coverage statistic
  int64_t instance_pairs = 0;

  const MetapathInstanceSet& instance_set(int64_t node, int32_t metapath) const;
  const SenSample& sen(int64_t node) const;
};

Batch build_batch(const HeteroGraph& graph, const SenTemplate& tmpl,
                  const std::vector<int64_t>& targets, int32_t layers, const SampleConfig& cfg,
                  Rng& rng);

// Text dump of a batch for inspection.
std::string describe(const Batch& b, const HeteroGraph& graph);

// --- relational-convolution baseline sampling ---------------------------------

struct TypedNode {
  int32_t type;
  int64_t index;
  auto operator<=>(const TypedNode&) const = default;
};

// One-hop typed neighbor samples per layer for the relational baseline.
// frontiers[k] = the typed targets; frontiers[l-1] adds every sampled
// neighbor of frontiers[l] across all relations (fanout-capped per relation).
struct RgcnBatch {
  int32_t layers = 1;
  std::vector<int64_t> targets;
  std::vector<std::vector<TypedNode>> frontiers;  // l = 0..layers, sorted unique
  // sampled neighbors per (node, edge type, direction)
  std::map<std::tuple<TypedNode, int32_t, Direction>, std::vector<int64_t>> nbrs;

  const std::vector<int64_t>& neighbors_of(TypedNode v, int32_t edge_type, Direction dir) const;
};

RgcnBatch build_rgcn_batch(const HeteroGraph& graph, const std::vector<int64_t>& targets,
                           int32_t layers, const SampleConfig& cfg, Rng& rng);

}  // namespace dhg
