#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhg/tensor.hpp"

namespace dhg {

// Edges are stored once per edge type; direction is a traversal-time flag.
enum class Direction : uint8_t { Forward, Reverse };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);
inline Direction flip(Direction d) {
  return d == Direction::Forward ? Direction::Reverse : Direction::Forward;
}

struct NodeTypeInfo {
  std::string name;
  int64_t feature_dim;
};

struct EdgeTypeInfo {
  std::string name;
  int32_t src_type;
  int32_t dst_type;
};

class Schema {
 public:
  int32_t add_node_type(const std::string& name, int64_t feature_dim);
  int32_t add_edge_type(const std::string& name, const std::string& src_type,
                        const std::string& dst_type);

  int32_t node_type_id(const std::string& name) const;  // throws ConfigError if unknown
  int32_t edge_type_id(const std::string& name) const;
  const NodeTypeInfo& node_type(int32_t id) const { return node_types_.at(static_cast<size_t>(id)); }
  const EdgeTypeInfo& edge_type(int32_t id) const { return edge_types_.at(static_cast<size_t>(id)); }
  int32_t num_node_types() const { return static_cast<int32_t>(node_types_.size()); }
  int32_t num_edge_types() const { return static_cast<int32_t>(edge_types_.size()); }

  // Node type reached when traversing `edge_type` in `dir` (and the type left from).
  int32_t step_from(int32_t edge_type, Direction dir) const;
  int32_t step_to(int32_t edge_type, Direction dir) const;

  // All (edge type, direction) pairs leaving `node_type`, ordered by
  // (edge type id, forward before reverse). A self-relation contributes both.
  std::vector<std::pair<int32_t, Direction>> incident(int32_t node_type) const;

 private:
  std::vector<NodeTypeInfo> node_types_;
  std::vector<EdgeTypeInfo> edge_types_;
};

struct MetapathStep {
  int32_t edge_type;
  Direction dir;
};

struct Metapath {
  std::string name;
  std::vector<MetapathStep> steps;
};

// Returns the node-type sequence A1..An traced by the metapath, or throws
// ConfigError naming the first step that does not chain.
std::vector<int32_t> metapath_type_check(const Schema& schema, const Metapath& m);

struct NodeRef {
  int32_t type;
  int64_t index;
};

class HeteroGraph {
 public:
  HeteroGraph() = default;
  explicit HeteroGraph(Schema schema);

  const Schema& schema() const { return schema_; }

  // Appends a node of `type`; the feature vector length must equal the type's
  // declared dimension. Returns the new dense index.
  int64_t add_node(int32_t type, std::vector<double> feature);

  // Endpoint indices are interpreted under the edge type's declared endpoint
  // types. Bad endpoints are recorded as violations (reported by validate())
  // and the edge is dropped, so one pass can surface every problem in a file.
  void add_edge(int32_t edge_type, int64_t src, int64_t dst);
  // As above but with explicit endpoint types, which must match the declaration.
  void add_edge(int32_t edge_type, NodeRef src, NodeRef dst);

  int64_t num_nodes(int32_t type) const;
  int64_t total_nodes() const;
  int64_t total_edges() const;
  const std::vector<std::pair<int64_t, int64_t>>& edge_list(int32_t edge_type) const;

  Tensor feature_row(int32_t type, int64_t index) const;  // 1 x feature_dim copy
  const std::vector<double>& feature_data(int32_t type) const;

  void set_target_type(int32_t type, int64_t num_classes);
  int32_t target_type() const { return target_type_; }
  int64_t num_classes() const { return num_classes_; }
  void set_label(int64_t target_index, int64_t cls);
  int64_t label(int64_t target_index) const;
  const std::vector<int64_t>& labels() const { return labels_; }

  void register_metapath(Metapath m);
  const std::vector<Metapath>& metapaths() const { return metapaths_; }

  // Builds the sorted adjacency index for both directions. Must be called
  // after the last mutation and before neighbors()/degree().
  void finalize();
  bool finalized() const { return finalized_; }

  // All neighbors of (node_type, index) across `edge_type` traversed in `dir`,
  // ascending. Throws ConfigError when the node type does not match the edge
  // type's endpoint for that direction, or the index is out of range.
  std::span<const int64_t> neighbors(int32_t node_type, int64_t index, int32_t edge_type,
                                     Direction dir) const;
  int64_t degree(int32_t node_type, int64_t index, int32_t edge_type, Direction dir) const;

  // Aggregated invariant violations; empty means valid.
  std::vector<std::string> validate() const;

  // Human-readable per-type node/edge counts plus totals.
  std::string summary() const;

 private:
  struct Csr {
    std::vector<int64_t> offsets;
    std::vector<int64_t> values;
  };

  Schema schema_;
  std::vector<int64_t> node_counts_;        // by node type
  std::vector<std::vector<double>> feats_;  // by node type, row-major count x dim
  std::vector<std::vector<std::pair<int64_t, int64_t>>> edges_;  // by edge type
  int32_t target_type_ = -1;
  int64_t num_classes_ = 0;
  std::vector<int64_t> labels_;  // -1 = unset
  std::vector<Metapath> metapaths_;
  std::vector<std::string> construction_violations_;
  std::vector<Csr> fwd_;  // by edge type: src -> dst lists
  std::vector<Csr> rev_;  // by edge type: dst -> src lists
  bool finalized_ = false;
};

struct Dataset {
  HeteroGraph graph;
  std::vector<std::vector<int64_t>> folds;  // test folds over target indices
};

// Contents of a schema.json (loadable without the rest of the dataset).
struct SchemaFile {
  Schema schema;
  int32_t target_type = -1;
  int64_t num_classes = 0;
  std::vector<Metapath> metapaths;
};

SchemaFile load_schema_file(const std::string& path);

// Dataset directory: schema.json, nodes_<type>.tsv, edges_<edge_type>.tsv,
// labels.tsv, splits.json. Loading finalizes the graph; semantic violations
// are left to validate(). Malformed files throw ConfigError with file:line.
Dataset load_dataset(const std::string& dir);
void save_dataset(const std::string& dir, const Dataset& ds);

// Disjointness/coverage/range violations of ds.folds; empty means valid.
std::vector<std::string> validate_splits(const Dataset& ds);

// Shortest round-trip decimal form used across all text output.
std::string format_double(double v);

}  // namespace dhg
