#include "dhg/model.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "dhg/error.hpp"

namespace dhg {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::DhgcnH: return "dhgcn-h";
    case Variant::DhgcnS: return "dhgcn-s";
    case Variant::Rgcn: return "rgcn";
  }
  throw ConfigError("to_string: unknown variant");
}

Variant variant_from_string(const std::string& s) {
  if (s == "dhgcn-h") return Variant::DhgcnH;
  if (s == "dhgcn-s") return Variant::DhgcnS;
  if (s == "rgcn") return Variant::Rgcn;
  throw ConfigError("unknown model variant '" + s + "' (expected dhgcn-h, dhgcn-s or rgcn)");
}

std::string tau_param_name(Variant v, const std::string& type_name) {
  switch (v) {
    case Variant::DhgcnH: return "step1.ha.tau." + type_name;
    case Variant::DhgcnS: return "step1.sa.tau." + type_name;
    case Variant::Rgcn: return "rgcn.tau." + type_name;
  }
  throw ConfigError("tau_param_name: unknown variant");
}

std::string phi_param_name(const std::string& edge_name) { return "step1.ha.phi." + edge_name; }

std::string psi_param_name(const std::string& path_key) { return "step1.sa.psi." + path_key; }

std::string attn_param_name(int32_t layer, const std::string& metapath_name) {
  return "step2.attn.l" + std::to_string(layer) + "." + metapath_name;
}

std::string mix_param_name(int32_t layer, const std::string& metapath_name) {
  return "step2.mix.l" + std::to_string(layer) + "." + metapath_name;
}

std::string rgcn_rel_param_name(int32_t layer, const std::string& edge_name, Direction dir) {
  return "rgcn.l" + std::to_string(layer) + "." + edge_name +
         (dir == Direction::Forward ? ".f" : ".r");
}

std::string rgcn_self_param_name(int32_t layer) {
  return "rgcn.l" + std::to_string(layer) + ".self";
}

Tape::Val StepContext::projected_feature(int32_t type, int64_t node) {
  const auto key = std::make_pair(type, node);
  auto it = tau_cache.find(key);
  if (it != tau_cache.end()) return it->second;
  Parameter& w = store.at(tau_param_name(variant, graph.schema().node_type(type).name));
  Tape::Val proj = tape.matmul(tape.constant(graph.feature_row(type, node)), param_val(w));
  tau_cache.emplace(key, proj);
  return proj;
}

Tape::Val StepContext::param_val(Parameter& p) {
  auto it = param_cache.find(&p);
  if (it != param_cache.end()) return it->second;
  Tape::Val v = tape.param(p);
  param_cache.emplace(&p, v);
  return v;
}

Tape::Val ha_aggregate(StepContext& ctx, const SenSample& sen) {
  if (sen.occs.empty()) throw ShapeError("ha_aggregate: empty ego-net sample");
  const auto& states = ctx.tmpl.states;
  auto eval = [&](auto&& self, int32_t oi) -> Tape::Val {
    const auto& occ = sen.occs[static_cast<size_t>(oi)];
    const SenState& st = states[static_cast<size_t>(occ.state)];
    std::vector<Tape::Val> terms;
    terms.push_back(ctx.projected_feature(st.node_type, occ.node));
    for (int32_t ci : occ.children) {
      const auto& child = sen.occs[static_cast<size_t>(ci)];
      const SenState& cst = states[static_cast<size_t>(child.state)];
      Parameter& phi = ctx.store.at(
          phi_param_name(ctx.graph.schema().edge_type(cst.incoming_edge).name));
      terms.push_back(ctx.tape.matmul(self(self, ci), ctx.param_val(phi)));
    }
    Tape::Val z = ctx.tape.add_n(terms);
    return oi == 0 ? z : ctx.tape.activate(z, ctx.act);
  };
  return eval(eval, 0);
}

Tape::Val sa_aggregate(StepContext& ctx, const SenSample& sen) {
  if (sen.occs.empty()) throw ShapeError("sa_aggregate: empty ego-net sample");
  std::vector<Tape::Val> terms;
  for (const auto& occ : sen.occs) {
    const SenState& st = ctx.tmpl.states[static_cast<size_t>(occ.state)];
    Parameter& psi = ctx.store.at(psi_param_name(st.path_key));
    terms.push_back(
        ctx.tape.matmul(ctx.projected_feature(st.node_type, occ.node), ctx.param_val(psi)));
  }
  return ctx.tape.add_n(terms);
}

Tape::Val attention_logit(StepContext& ctx, const std::vector<int64_t>& instance,
                          const std::vector<int32_t>& node_types, Tape::Val h_src,
                          Tape::Val h_dst, int32_t layer, const std::string& metapath_name) {
  if (instance.size() != node_types.size() || instance.size() < 2)
    throw ShapeError("attention_logit: instance and type sequence lengths differ");
  std::vector<Tape::Val> parts;
  parts.push_back(h_src);
  for (size_t j = 1; j + 1 < instance.size(); ++j)
    parts.push_back(ctx.projected_feature(node_types[j], instance[j]));
  parts.push_back(h_dst);
  Parameter& w = ctx.store.at(attn_param_name(layer, metapath_name));
  return ctx.tape.activate(ctx.tape.matmul(ctx.tape.concat_cols(parts), ctx.param_val(w)),
                           ctx.act);
}

Tape::Val metapath_conv(StepContext& ctx, const MetapathInstanceSet& set,
                        const std::vector<int32_t>& node_types,
                        const std::map<int64_t, Tape::Val>& h_prev, int32_t layer,
                        const std::string& metapath_name) {
  if (set.instances.empty()) return ctx.tape.constant(Tensor(1, ctx.hidden_dim));
  std::vector<Tape::Val> logits;
  std::vector<Tape::Val> srcs;
  for (const auto& inst : set.instances) {
    Tape::Val hs = h_prev.at(inst.front());
    Tape::Val hd = h_prev.at(inst.back());
    logits.push_back(attention_logit(ctx, inst, node_types, hs, hd, layer, metapath_name));
    srcs.push_back(hs);
  }
  Tape::Val q = ctx.tape.softmax_row(ctx.tape.concat_cols(logits));
  return ctx.tape.matmul(q, ctx.tape.stack_rows(srcs));
}

Tape::Val mix_metapaths(StepContext& ctx, const std::vector<Tape::Val>& per_metapath,
                        const std::vector<std::string>& metapath_names, int32_t layer) {
  if (per_metapath.empty() || per_metapath.size() != metapath_names.size())
    throw ConfigError("mix_metapaths: one representation per configured metapath required");
  std::vector<Tape::Val> terms;
  for (size_t m = 0; m < per_metapath.size(); ++m) {
    Parameter& w = ctx.store.at(mix_param_name(layer, metapath_names[m]));
    terms.push_back(ctx.tape.matmul(per_metapath[m], ctx.param_val(w)));
  }
  return ctx.tape.activate(ctx.tape.add_n(terms), ctx.act);
}

Model::Model(const HeteroGraph& graph, ModelConfig cfg) : graph_(&graph), cfg_(cfg) {
  if (cfg_.hidden_dim < 1) throw ConfigError("model: hidden dimension must be >= 1");
  const int32_t min_layers = cfg_.variant == Variant::Rgcn ? 1 : 0;
  if (cfg_.layers < min_layers || cfg_.layers > 4)
    throw ConfigError("model: layer count " + std::to_string(cfg_.layers) + " outside [" +
                      std::to_string(min_layers) + ", 4] for " + to_string(cfg_.variant));
  if (graph.target_type() < 0) throw ConfigError("model: dataset has no target type");
  if (graph.num_classes() < 2) throw ConfigError("model: need at least two classes");
  cfg_.num_classes = graph.num_classes();
  tmpl_ = derive_sen_template(graph.schema(), graph.target_type());
  for (const auto& m : graph.metapaths()) {
    auto types = metapath_type_check(graph.schema(), m);
    if (cfg_.variant != Variant::Rgcn &&
        (types.front() != graph.target_type() || types.back() != graph.target_type()))
      throw ConfigError("model: metapath " + m.name +
                        " must start and end at the target type");
    metapath_types_.push_back(std::move(types));
  }
  if (cfg_.variant != Variant::Rgcn && cfg_.layers >= 1 && graph.metapaths().empty())
    throw ConfigError("model: layered variants need at least one metapath");
}

void Model::init_params(ParameterStore& store, uint64_t seed) const {
  const int64_t d = cfg_.hidden_dim;
  const Schema& sch = graph_->schema();
  if (cfg_.variant == Variant::Rgcn) {
    for (int32_t t = 0; t < sch.num_node_types(); ++t)
      store.create_glorot(tau_param_name(cfg_.variant, sch.node_type(t).name),
                          sch.node_type(t).feature_dim, d, seed);
    for (int32_t l = 1; l <= cfg_.layers; ++l) {
      for (int32_t e = 0; e < sch.num_edge_types(); ++e) {
        const std::string& en = sch.edge_type(e).name;
        store.create_glorot(rgcn_rel_param_name(l, en, Direction::Forward), d, d, seed);
        store.create_glorot(rgcn_rel_param_name(l, en, Direction::Reverse), d, d, seed);
      }
      store.create_glorot(rgcn_self_param_name(l), d, d, seed);
    }
  } else {
    std::set<int32_t> tau_types;
    for (const auto& st : tmpl_.states) tau_types.insert(st.node_type);
    for (const auto& types : metapath_types_) tau_types.insert(types.begin(), types.end());
    for (int32_t t : tau_types)
      store.create_glorot(tau_param_name(cfg_.variant, sch.node_type(t).name),
                          sch.node_type(t).feature_dim, d, seed);
    if (cfg_.variant == Variant::DhgcnH) {
      std::set<int32_t> edges;
      for (const auto& st : tmpl_.states)
        if (st.incoming_edge >= 0) edges.insert(st.incoming_edge);
      for (int32_t e : edges)
        store.create_glorot(phi_param_name(sch.edge_type(e).name), d, d, seed);
    } else {
      for (const auto& st : tmpl_.states)
        store.create_glorot(psi_param_name(st.path_key), d, d, seed);
    }
    const auto& mps = graph_->metapaths();
    for (int32_t l = 1; l <= cfg_.layers; ++l) {
      for (size_t m = 0; m < mps.size(); ++m) {
        const auto path_len = static_cast<int64_t>(metapath_types_[m].size());
        store.create_glorot(attn_param_name(l, mps[m].name), path_len * d, 1, seed);
        store.create_glorot(mix_param_name(l, mps[m].name), d, d, seed);
      }
    }
  }
  store.create_glorot("head", d, cfg_.num_classes, seed);
}

std::vector<Tape::Val> Model::forward(Tape& tape, ParameterStore& store,
                                      const Batch& batch) const {
  if (cfg_.variant == Variant::Rgcn)
    throw ConfigError("model: the relational baseline takes the typed one-hop batch");
  if (batch.layers != cfg_.layers)
    throw ConfigError("model: batch was built for " + std::to_string(batch.layers) +
                      " layers, model has " + std::to_string(cfg_.layers));
  StepContext ctx{tape, store, *graph_, tmpl_, cfg_.variant, cfg_.activation, cfg_.hidden_dim,
                  {},   {}};
  std::map<int64_t, Tape::Val> h_prev;
  for (int64_t v : batch.frontiers[0]) {
    const SenSample& sen = batch.sen(v);
    h_prev[v] =
        cfg_.variant == Variant::DhgcnH ? ha_aggregate(ctx, sen) : sa_aggregate(ctx, sen);
  }
  const auto& mps = graph_->metapaths();
  std::vector<std::string> names;
  for (const auto& m : mps) names.push_back(m.name);
  for (int32_t l = 1; l <= cfg_.layers; ++l) {
    std::map<int64_t, Tape::Val> h_cur;
    for (int64_t v : batch.frontiers[static_cast<size_t>(l)]) {
      std::vector<Tape::Val> per_mp;
      for (size_t m = 0; m < mps.size(); ++m)
        per_mp.push_back(metapath_conv(ctx, batch.instance_set(v, static_cast<int32_t>(m)),
                                       metapath_types_[m], h_prev, l, mps[m].name));
      h_cur[v] = mix_metapaths(ctx, per_mp, names, l);
    }
    h_prev = std::move(h_cur);
  }
  Tape::Val head = ctx.param_val(store.at("head"));
  std::vector<Tape::Val> logits;
  for (int64_t t : batch.targets) logits.push_back(tape.matmul(h_prev.at(t), head));
  return logits;
}

std::vector<Tape::Val> Model::forward(Tape& tape, ParameterStore& store,
                                      const RgcnBatch& batch) const {
  if (cfg_.variant != Variant::Rgcn)
    throw ConfigError("model: metapath variants take the instance batch");
  if (batch.layers != cfg_.layers)
    throw ConfigError("model: batch was built for " + std::to_string(batch.layers) +
                      " layers, model has " + std::to_string(cfg_.layers));
  const Schema& sch = graph_->schema();
  StepContext ctx{tape, store, *graph_, tmpl_, cfg_.variant, cfg_.activation, cfg_.hidden_dim,
                  {},   {}};
  // Neighborhood size with the implicit self-edge; drives the symmetric
  // normalization and is taken from the full graph, not the sample.
  std::map<TypedNode, double> nbhd;
  auto nbhd_size = [&](TypedNode v) -> double {
    auto it = nbhd.find(v);
    if (it != nbhd.end()) return it->second;
    int64_t n = 1;
    for (const auto& [e, dir] : sch.incident(v.type))
      n += graph_->degree(v.type, v.index, e, dir);
    const auto sz = static_cast<double>(n);
    nbhd.emplace(v, sz);
    return sz;
  };
  std::map<TypedNode, Tape::Val> h_prev;
  for (TypedNode v : batch.frontiers[0]) h_prev[v] = ctx.projected_feature(v.type, v.index);
  for (int32_t l = 1; l <= cfg_.layers; ++l) {
    std::map<TypedNode, Tape::Val> h_cur;
    Tape::Val wself = ctx.param_val(store.at(rgcn_self_param_name(l)));
    for (TypedNode v : batch.frontiers[static_cast<size_t>(l)]) {
      const double nv = nbhd_size(v);
      std::vector<Tape::Val> terms;
      terms.push_back(tape.scale(tape.matmul(h_prev.at(v), wself), 1.0 / nv));
      for (const auto& [e, dir] : sch.incident(v.type)) {
        const auto& nbrs = batch.neighbors_of(v, e, dir);
        if (nbrs.empty()) continue;
        const int32_t other = sch.step_to(e, dir);
        // The relation matrix is shared, so normalize and sum first, then
        // project the aggregate once.
        std::vector<Tape::Val> rows;
        Tensor q(1, static_cast<int64_t>(nbrs.size()));
        for (size_t j = 0; j < nbrs.size(); ++j) {
          TypedNode u{other, nbrs[j]};
          rows.push_back(h_prev.at(u));
          q.at(0, static_cast<int64_t>(j)) = 1.0 / std::sqrt(nv * nbhd_size(u));
        }
        Tape::Val s = tape.matmul(tape.constant(std::move(q)), tape.stack_rows(rows));
        Parameter& wr = store.at(rgcn_rel_param_name(l, sch.edge_type(e).name, dir));
        terms.push_back(tape.matmul(s, ctx.param_val(wr)));
      }
      h_cur[v] = tape.activate(tape.add_n(terms), cfg_.activation);
    }
    h_prev = std::move(h_cur);
  }
  Tape::Val head = ctx.param_val(store.at("head"));
  std::vector<Tape::Val> logits;
  const int32_t tt = graph_->target_type();
  for (int64_t t : batch.targets) logits.push_back(tape.matmul(h_prev.at(TypedNode{tt, t}), head));
  return logits;
}

Tape::Val Model::mean_nll(Tape& tape, const std::vector<Tape::Val>& logits,
                          const std::vector<int64_t>& labels) {
  if (logits.empty() || logits.size() != labels.size())
    throw ConfigError("mean_nll: need exactly one label per logit row");
  std::vector<Tape::Val> terms;
  for (size_t i = 0; i < logits.size(); ++i)
    terms.push_back(tape.nll_logsoftmax(logits[i], labels[i]));
  return tape.scale(tape.add_n(terms), 1.0 / static_cast<double>(logits.size()));
}

}  // namespace dhg
