#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhg/graph.hpp"
#include "dhg/rng.hpp"

namespace dhg {

// One state of the schema-level ego-network template tree.
struct SenState {
  int32_t node_type;
  int32_t incoming_edge = -1;  // -1 at the root
  Direction incoming_dir = Direction::Forward;
  int32_t parent = -1;  // index into SenTemplate::states, -1 at the root
  std::vector<int32_t> children;
  // Names the root-to-state path; used as the key for path-specific
  // parameters: "<target>" at the root, parent + ">" + edge + ".f"/".r" below.
  std::string path_key;
};

struct SenTemplate {
  int32_t target_type = -1;
  std::vector<SenState> states;  // states[0] is the root; children precede nothing (DFS order)
};

// Depth-first expansion from the target type. At every state each incident
// edge type not yet used on the root path expands once (a relation and its
// inverse count as one use); children are ordered by (edge type id, forward
// before reverse), so the template is deterministic for a given schema.
SenTemplate derive_sen_template(const Schema& schema, int32_t target_type);

// Indented tree with edge-type annotations, stable across runs.
std::string format_sen_template(const Schema& schema, const SenTemplate& t);

// A sampled instantiation of the template for one target node. Occurrences
// form a tree over indices into `occs`; occs[0] is the target itself. The
// same graph node may appear in several occurrences.
struct SenSample {
  struct Occurrence {
    int32_t state;  // index into SenTemplate::states
    int64_t node;   // graph node index of states[state].node_type
    std::vector<int32_t> children;  // indices into occs
  };
  std::vector<Occurrence> occs;
};

// Per (parent occurrence, child state): if the typed neighbor count is at most
// `fanout` all neighbors are taken, otherwise `fanout` are sampled without
// replacement. Nodes without neighbors simply lack that subtree.
SenSample instantiate_sen(const HeteroGraph& graph, const SenTemplate& t, int64_t target_node,
                          int64_t fanout, Rng& rng);

}  // namespace dhg
