#include "dhg/sen.hpp"

#include <sstream>

#include "dhg/error.hpp"

namespace dhg {

namespace {

void expand(const Schema& schema, SenTemplate& t, int32_t state_idx,
            std::vector<bool>& used_edge_types) {
  const int32_t type = t.states[static_cast<size_t>(state_idx)].node_type;
  for (const auto& [edge, dir] : schema.incident(type)) {
    if (used_edge_types[static_cast<size_t>(edge)]) continue;
    SenState child;
    child.node_type = schema.step_to(edge, dir);
    child.incoming_edge = edge;
    child.incoming_dir = dir;
    child.parent = state_idx;
    child.path_key = t.states[static_cast<size_t>(state_idx)].path_key + ">" +
                     schema.edge_type(edge).name + (dir == Direction::Forward ? ".f" : ".r");
    const auto child_idx = static_cast<int32_t>(t.states.size());
    t.states.push_back(std::move(child));
    t.states[static_cast<size_t>(state_idx)].children.push_back(child_idx);
    used_edge_types[static_cast<size_t>(edge)] = true;
    expand(schema, t, child_idx, used_edge_types);
    used_edge_types[static_cast<size_t>(edge)] = false;
  }
}

}  // namespace

SenTemplate derive_sen_template(const Schema& schema, int32_t target_type) {
  if (target_type < 0 || target_type >= schema.num_node_types())
    throw ConfigError("derive_sen_template: invalid node type id " + std::to_string(target_type));
  SenTemplate t;
  t.target_type = target_type;
  SenState root;
  root.node_type = target_type;
  root.path_key = schema.node_type(target_type).name;
  t.states.push_back(std::move(root));
  std::vector<bool> used(static_cast<size_t>(schema.num_edge_types()), false);
  expand(schema, t, 0, used);
  return t;
}

namespace {

void format_state(const Schema& schema, const SenTemplate& t, int32_t idx, int depth,
                  std::ostringstream& os) {
  const SenState& s = t.states[static_cast<size_t>(idx)];
  for (int i = 0; i < depth; ++i) os << "  ";
  os << schema.node_type(s.node_type).name;
  if (s.incoming_edge >= 0)
    os << " (" << schema.edge_type(s.incoming_edge).name << ", " << to_string(s.incoming_dir)
       << ")";
  os << "\n";
  for (int32_t c : s.children) format_state(schema, t, c, depth + 1, os);
}

}  // namespace

std::string format_sen_template(const Schema& schema, const SenTemplate& t) {
  std::ostringstream os;
  format_state(schema, t, 0, 0, os);
  return os.str();
}

SenSample instantiate_sen(const HeteroGraph& graph, const SenTemplate& t, int64_t target_node,
                          int64_t fanout, Rng& rng) {
  if (fanout < 1) throw ConfigError("instantiate_sen: fanout must be >= 1");
  if (target_node < 0 || target_node >= graph.num_nodes(t.target_type))
    throw ConfigError("instantiate_sen: target index " + std::to_string(target_node) +
                      " out of range");
  SenSample sample;
  sample.occs.push_back({0, target_node, {}});
  // breadth-first over occurrences; template child order fixes the draw order
  for (size_t cur = 0; cur < sample.occs.size(); ++cur) {
    const int32_t state_idx = sample.occs[cur].state;
    const SenState& state = t.states[static_cast<size_t>(state_idx)];
    const int64_t node = sample.occs[cur].node;
    for (int32_t child_state : state.children) {
      const SenState& cs = t.states[static_cast<size_t>(child_state)];
      const auto nbrs =
          graph.neighbors(state.node_type, node, cs.incoming_edge, cs.incoming_dir);
      const auto n = static_cast<int64_t>(nbrs.size());
      if (n == 0) continue;
      if (n <= fanout) {
        for (int64_t i = 0; i < n; ++i) {
          sample.occs[cur].children.push_back(static_cast<int32_t>(sample.occs.size()));
          sample.occs.push_back({child_state, nbrs[static_cast<size_t>(i)], {}});
        }
      } else {
        for (int64_t pick : rng.sample_without_replacement(n, fanout)) {
          sample.occs[cur].children.push_back(static_cast<int32_t>(sample.occs.size()));
          sample.occs.push_back({child_state, nbrs[static_cast<size_t>(pick)], {}});
        }
      }
    }
  }
  return sample;
}

}  // namespace dhg
