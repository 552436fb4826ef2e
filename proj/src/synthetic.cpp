#include "dhg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <utility>

#include "dhg/error.hpp"
#include "dhg/rng.hpp"

namespace dhg {

namespace {

void check_config(const SynthConfig& c) {
  if (c.family_index < 1 || c.family_index > 10)
    throw ConfigError("synthetic: family index must be in [1, 10], got " +
                      std::to_string(c.family_index));
  if (c.n_targets < 1) throw ConfigError("synthetic: need at least one target");
  if (c.feature_dim < 10)
    throw ConfigError(
        "synthetic: feature dimension must be >= 10 to keep the class mixtures separable");
  if (c.num_classes < 2) throw ConfigError("synthetic: need at least two classes");
  if (c.mixture_components < 1) throw ConfigError("synthetic: need at least one component");
  if (c.dirichlet_alpha <= 0.0) throw ConfigError("synthetic: dirichlet alpha must be positive");
  if (c.info_count_std <= 0.0)
    throw ConfigError("synthetic: info count deviation must be positive");
  if (c.component_mean_scale <= 0.0)
    throw ConfigError("synthetic: component mean scale must be positive");
}

std::vector<double> gaussian_row(Rng& rng, const std::vector<double>& mean) {
  std::vector<double> x(mean.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = mean[i] + rng.normal();
  return x;
}

nlohmann::json config_to_json(const SynthConfig& c) {
  return {{"family_index", c.family_index},
          {"n_targets", c.n_targets},
          {"feature_dim", c.feature_dim},
          {"num_classes", c.num_classes},
          {"mixture_components", c.mixture_components},
          {"dirichlet_alpha", c.dirichlet_alpha},
          {"info_count_std", c.info_count_std},
          {"component_mean_scale", c.component_mean_scale},
          {"seed", c.seed}};
}

SynthConfig config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  c.family_index = j.at("family_index").get<int32_t>();
  c.n_targets = j.at("n_targets").get<int64_t>();
  c.feature_dim = j.at("feature_dim").get<int64_t>();
  c.num_classes = j.at("num_classes").get<int64_t>();
  c.mixture_components = j.at("mixture_components").get<int64_t>();
  c.dirichlet_alpha = j.at("dirichlet_alpha").get<double>();
  c.info_count_std = j.at("info_count_std").get<double>();
  c.component_mean_scale = j.at("component_mean_scale").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace

SynthResult generate(const SynthConfig& config) {
  check_config(config);
  const int64_t K = config.mixture_components;
  const int64_t C = config.num_classes;
  const int64_t dim = config.feature_dim;
  Rng rng(derive_seed(config.seed,
                      {hash_tag("synthetic"), static_cast<uint64_t>(config.family_index)}));

  GeneratorTrace trace;
  trace.config = config;

  // mixture latents
  for (int64_t k = 0; k < K; ++k) {
    std::vector<double> mu(static_cast<size_t>(dim));
    for (double& v : mu) v = rng.normal(0.0, config.component_mean_scale);
    trace.component_means.push_back(std::move(mu));
  }
  for (int64_t c = 0; c < C; ++c)
    trace.class_mixtures.push_back(rng.dirichlet(config.dirichlet_alpha, K));

  // bridge pools and class-dependent attachment distributions
  for (int b = 0; b < 3; ++b) trace.bridge_counts.push_back(rng.uniform_int(5, 10));
  for (int64_t c = 0; c < C; ++c) {
    trace.bridge_multinomials.emplace_back();
    for (int b = 0; b < 3; ++b)
      trace.bridge_multinomials.back().push_back(
          rng.dirichlet(config.dirichlet_alpha, trace.bridge_counts[static_cast<size_t>(b)]));
  }

  Schema schema;
  schema.add_node_type("target", dim);
  schema.add_node_type("info", dim);
  schema.add_node_type("bridge_a", dim);
  schema.add_node_type("bridge_b", dim);
  schema.add_node_type("bridge_c", dim);
  schema.add_edge_type("ti", "target", "info");
  schema.add_edge_type("ta", "target", "bridge_a");
  schema.add_edge_type("tb", "target", "bridge_b");
  schema.add_edge_type("tc", "target", "bridge_c");
  HeteroGraph g(std::move(schema));

  // Bridge nodes are content-free (identical zero features): which bridge a
  // target attaches to must be invisible to a depth-0 model, so the class
  // signal in the attachment pattern is reachable only through the
  // metapath-neighbors it induces.
  for (int b = 0; b < 3; ++b) {
    const int32_t type = 2 + b;
    for (int64_t i = 0; i < trace.bridge_counts[static_cast<size_t>(b)]; ++i)
      g.add_node(type, std::vector<double>(static_cast<size_t>(dim), 0.0));
  }

  for (int64_t t = 0; t < config.n_targets; ++t) {
    const int64_t cls = rng.uniform_int(0, C - 1);
    const auto& mix = trace.class_mixtures[static_cast<size_t>(cls)];
    const int64_t comp = rng.categorical(mix);
    trace.target_class.push_back(cls);
    trace.target_component.push_back(comp);
    const int64_t tn =
        g.add_node(0, gaussian_row(rng, trace.component_means[static_cast<size_t>(comp)]));

    trace.target_bridge_choice.emplace_back();
    for (int b = 0; b < 3; ++b) {
      const int64_t pick =
          rng.categorical(trace.bridge_multinomials[static_cast<size_t>(cls)][static_cast<size_t>(b)]);
      trace.target_bridge_choice.back().push_back(pick);
      g.add_edge(1 + b, tn, pick);  // edge types ta/tb/tc are ids 1..3
    }

    const long raw = std::lround(rng.normal(config.family_index, config.info_count_std));
    const int64_t j = std::max<long>(raw, 1);
    trace.info_counts.push_back(j);
    trace.info_components.emplace_back();
    for (int64_t q = 0; q < j; ++q) {
      const int64_t ic = rng.categorical(mix);
      trace.info_components.back().push_back(ic);
      const int64_t in =
          g.add_node(1, gaussian_row(rng, trace.component_means[static_cast<size_t>(ic)]));
      g.add_edge(0, tn, in);  // "ti"
    }
  }

  g.set_target_type(0, C);
  for (int64_t t = 0; t < config.n_targets; ++t)
    g.set_label(t, trace.target_class[static_cast<size_t>(t)]);

  const int32_t ta = 1, tb = 2, tc = 3;
  g.register_metapath({"Target-A-Target",
                       {{ta, Direction::Forward}, {ta, Direction::Reverse}}});
  g.register_metapath({"Target-B-Target",
                       {{tb, Direction::Forward}, {tb, Direction::Reverse}}});
  g.register_metapath({"Target-C-Target",
                       {{tc, Direction::Forward}, {tc, Direction::Reverse}}});
  g.finalize();

  SynthResult out;
  out.dataset.graph = std::move(g);
  out.trace = std::move(trace);

  // disjoint covering folds: a seeded shuffle chunked into 5 near-equal parts
  std::vector<int64_t> order(static_cast<size_t>(config.n_targets));
  for (int64_t i = 0; i < config.n_targets; ++i) order[static_cast<size_t>(i)] = i;
  rng.shuffle(order);
  const int64_t folds = 5;
  out.dataset.folds.resize(folds);
  for (int64_t i = 0; i < config.n_targets; ++i)
    out.dataset.folds[static_cast<size_t>(i % folds)].push_back(order[static_cast<size_t>(i)]);
  for (auto& f : out.dataset.folds) std::sort(f.begin(), f.end());
  return out;
}

void save_trace(const std::string& path, const GeneratorTrace& trace) {
  nlohmann::json j;
  j["config"] = config_to_json(trace.config);
  j["component_means"] = trace.component_means;
  j["class_mixtures"] = trace.class_mixtures;
  j["bridge_counts"] = trace.bridge_counts;
  j["bridge_multinomials"] = trace.bridge_multinomials;
  j["target_class"] = trace.target_class;
  j["target_component"] = trace.target_component;
  j["target_bridge_choice"] = trace.target_bridge_choice;
  j["info_counts"] = trace.info_counts;
  j["info_components"] = trace.info_components;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

GeneratorTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    GeneratorTrace t;
    t.config = config_from_json(j.at("config"));
    t.component_means = j.at("component_means").get<std::vector<std::vector<double>>>();
    t.class_mixtures = j.at("class_mixtures").get<std::vector<std::vector<double>>>();
    t.bridge_counts = j.at("bridge_counts").get<std::vector<int64_t>>();
    t.bridge_multinomials =
        j.at("bridge_multinomials").get<std::vector<std::vector<std::vector<double>>>>();
    t.target_class = j.at("target_class").get<std::vector<int64_t>>();
    t.target_component = j.at("target_component").get<std::vector<int64_t>>();
    t.target_bridge_choice =
        j.at("target_bridge_choice").get<std::vector<std::vector<int64_t>>>();
    t.info_counts = j.at("info_counts").get<std::vector<int64_t>>();
    t.info_components = j.at("info_components").get<std::vector<std::vector<int64_t>>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::vector<double>> target_feature_bag(const HeteroGraph& graph, int64_t target) {
  const int32_t tt = graph.schema().node_type_id("target");
  const int32_t ti = graph.schema().edge_type_id("ti");
  std::vector<std::vector<double>> bag;
  bag.push_back(graph.feature_row(tt, target).vec());
  for (int64_t info : graph.neighbors(tt, target, ti, Direction::Forward))
    bag.push_back(graph.feature_row(graph.schema().node_type_id("info"), info).vec());
  return bag;
}

std::vector<double> bayes_posterior(const GeneratorTrace& trace,
                                    const std::vector<std::vector<double>>& features) {
  const auto C = trace.class_mixtures.size();
  const auto K = trace.component_means.size();
  if (C == 0 || K == 0) throw ConfigError("bayes_posterior: trace has no mixture latents");
  std::vector<double> logp(C, 0.0);  // uniform class prior cancels
  for (const auto& x : features) {
    // per component: log N(x; mu_k, I) up to the shared normalizer
    std::vector<double> lognorm(K);
    for (size_t k = 0; k < K; ++k) {
      const auto& mu = trace.component_means[k];
      if (mu.size() != x.size())
        throw ConfigError("bayes_posterior: feature dimension does not match the trace");
      double d2 = 0.0;
      for (size_t i = 0; i < x.size(); ++i) d2 += (x[i] - mu[i]) * (x[i] - mu[i]);
      lognorm[k] = -0.5 * d2;
    }
    for (size_t c = 0; c < C; ++c) {
      double mx = -std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < K; ++k) {
        const double term = std::log(trace.class_mixtures[c][k]) + lognorm[k];
        mx = std::max(mx, term);
      }
      double s = 0.0;
      for (size_t k = 0; k < K; ++k)
        s += std::exp(std::log(trace.class_mixtures[c][k]) + lognorm[k] - mx);
      logp[c] += mx + std::log(s);
    }
  }
  const double mx = *std::max_element(logp.begin(), logp.end());
  double z = 0.0;
  for (double v : logp) z += std::exp(v - mx);
  std::vector<double> post(C);
  for (size_t c = 0; c < C; ++c) post[c] = std::exp(logp[c] - mx) / z;
  return post;
}

double bayes_accuracy(const Dataset& ds, const GeneratorTrace& trace) {
  const int32_t tt = ds.graph.schema().node_type_id("target");
  const int64_t n = ds.graph.num_nodes(tt);
  if (n == 0) throw ConfigError("bayes_accuracy: dataset has no targets");
  int64_t hits = 0;
  for (int64_t t = 0; t < n; ++t) {
    const auto post = bayes_posterior(trace, target_feature_bag(ds.graph, t));
    const auto best = std::max_element(post.begin(), post.end()) - post.begin();
    if (best == ds.graph.label(t)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace dhg
