#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dhg/graph.hpp"
#include "dhg/params.hpp"
#include "dhg/sampling.hpp"
#include "dhg/sen.hpp"
#include "dhg/tape.hpp"

namespace dhg {

enum class Variant { DhgcnH, DhgcnS, Rgcn };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);  // dhgcn-h | dhgcn-s | rgcn

struct ModelConfig {
  Variant variant = Variant::DhgcnH;
  int32_t layers = 1;  // 0..4 (the relational baseline requires >= 1)
  int64_t hidden_dim = 64;
  Activation activation = Activation::tanh();
  int64_t num_classes = 0;  // filled from the dataset
};

// Parameter naming scheme (checkpoint keys).
std::string tau_param_name(Variant v, const std::string& type_name);
std::string phi_param_name(const std::string& edge_name);
std::string psi_param_name(const std::string& path_key);
std::string attn_param_name(int32_t layer, const std::string& metapath_name);
std::string mix_param_name(int32_t layer, const std::string& metapath_name);
// Suffix ".f"/".r" is the traversal direction from the receiving node.
std::string rgcn_rel_param_name(int32_t layer, const std::string& edge_name, Direction dir);
std::string rgcn_self_param_name(int32_t layer);

// Shared state for one forward pass: the tape, parameters, and a memo of
// type-specific input projections (the projection of a node's raw features is
// identical wherever the node occurs, so it is computed once per pass).
struct StepContext {
  Tape& tape;
  ParameterStore& store;
  const HeteroGraph& graph;
  const SenTemplate& tmpl;
  Variant variant;
  Activation act;
  int64_t hidden_dim;
  std::map<std::pair<int32_t, int64_t>, Tape::Val> tau_cache;
  std::map<const Parameter*, Tape::Val> param_cache;

  // W_tau(type) * f_node, memoized per (type, node).
  Tape::Val projected_feature(int32_t type, int64_t node);
  // Tape leaf for a parameter, pushed once per pass.
  Tape::Val param_val(Parameter& p);
};

// Leaf-to-root recursion over one sampled ego-net: every state applies
// z = W_tau f + sum over children of W_phi h, wrapped in the nonlinearity
// everywhere except at the root. Occurrences are evaluated independently.
Tape::Val ha_aggregate(StepContext& ctx, const SenSample& sen);

// Structure-free sum over all sampled occurrences (the root included) of the
// path-specific projection of the type-projected features.
Tape::Val sa_aggregate(StepContext& ctx, const SenSample& sen);

// Attention logit of one instance: concatenated source representation,
// type-projected intermediate features, and destination representation,
// projected to a scalar and passed through the nonlinearity.
Tape::Val attention_logit(StepContext& ctx, const std::vector<int64_t>& instance,
                          const std::vector<int32_t>& node_types, Tape::Val h_src,
                          Tape::Val h_dst, int32_t layer, const std::string& metapath_name);

// Softmax of the instance logits, then the attention-weighted sum of the
// sources' previous-layer representations. Empty sets yield the zero vector.
Tape::Val metapath_conv(StepContext& ctx, const MetapathInstanceSet& set,
                        const std::vector<int32_t>& node_types,
                        const std::map<int64_t, Tape::Val>& h_prev, int32_t layer,
                        const std::string& metapath_name);

// Per-metapath projection, sum, nonlinearity.
Tape::Val mix_metapaths(StepContext& ctx, const std::vector<Tape::Val>& per_metapath,
                        const std::vector<std::string>& metapath_names, int32_t layer);

class Model {
 public:
  // Validates the configuration against the dataset and derives the ego-net
  // template. The graph must outlive the model.
  Model(const HeteroGraph& graph, ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  const SenTemplate& sen_template() const { return tmpl_; }

  // Creates every parameter of the configured variant (no-op values are never
  // created lazily; the set is fixed so checkpoints are exhaustive).
  void init_params(ParameterStore& store, uint64_t seed) const;

  // Class logits per batch target, in target order.
  std::vector<Tape::Val> forward(Tape& tape, ParameterStore& store, const Batch& batch) const;
  std::vector<Tape::Val> forward(Tape& tape, ParameterStore& store,
                                 const RgcnBatch& batch) const;

  static Tape::Val mean_nll(Tape& tape, const std::vector<Tape::Val>& logits,
                            const std::vector<int64_t>& labels);

 private:
  const HeteroGraph* graph_;
  ModelConfig cfg_;
  SenTemplate tmpl_;
  std::vector<std::vector<int32_t>> metapath_types_;  // node-type sequence per metapath
};

}  // namespace dhg
