#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dhg/error.hpp"
#include "dhg/synthetic.hpp"

using namespace dhg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SynthConfig small_config(int32_t family, uint64_t seed, int64_t n = 200) {
  SynthConfig c;
  c.family_index = family;
  c.n_targets = n;
  c.seed = seed;
  return c;
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("generator configuration is range-checked") {
  CHECK_THROWS_AS(generate(small_config(0, 1)), ConfigError);
  CHECK_THROWS_AS(generate(small_config(11, 1)), ConfigError);
  SynthConfig c = small_config(3, 1);
  c.n_targets = 0;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small_config(3, 1);
  c.feature_dim = 9;  // below the documented floor
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small_config(3, 1);
  c.dirichlet_alpha = 0.0;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small_config(3, 1);
  c.num_classes = 1;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = small_config(3, 1);
  c.info_count_std = -1.0;
  CHECK_THROWS_AS(generate(c), ConfigError);
}

TEST_CASE("generated graphs have the documented structure") {
  SynthResult r = generate(small_config(3, 7));
  const HeteroGraph& g = r.dataset.graph;
  const Schema& s = g.schema();

  CHECK(g.validate().empty());
  CHECK(validate_splits(r.dataset).empty());

  const int32_t tt = s.node_type_id("target");
  REQUIRE(g.num_nodes(tt) == 200);
  CHECK(g.metapaths().size() == 3);
  CHECK(g.metapaths()[0].name == "Target-A-Target");
  CHECK(g.metapaths()[1].name == "Target-B-Target");
  CHECK(g.metapaths()[2].name == "Target-C-Target");

  // one edge per bridge type and at least one info neighbor, per target
  int64_t info_total = 0;
  for (int64_t t = 0; t < g.num_nodes(tt); ++t) {
    CHECK(g.degree(tt, t, s.edge_type_id("ta"), Direction::Forward) == 1);
    CHECK(g.degree(tt, t, s.edge_type_id("tb"), Direction::Forward) == 1);
    CHECK(g.degree(tt, t, s.edge_type_id("tc"), Direction::Forward) == 1);
    const int64_t j = g.degree(tt, t, s.edge_type_id("ti"), Direction::Forward);
    CHECK(j >= 1);
    CHECK(j == r.trace.info_counts[static_cast<size_t>(t)]);
    info_total += j;
    CHECK(g.label(t) == r.trace.target_class[static_cast<size_t>(t)]);
  }
  CHECK(info_total == g.num_nodes(s.node_type_id("info")));

  // bridge pools within [5,10]; bridge features are identical zero rows so a
  // target's attachment cannot be read off its immediate ego-net
  for (const char* name : {"bridge_a", "bridge_b", "bridge_c"}) {
    const int32_t bt = s.node_type_id(name);
    const int64_t n = g.num_nodes(bt);
    CHECK(n >= 5);
    CHECK(n <= 10);
    for (int64_t i = 0; i < n; ++i) {
      Tensor f = g.feature_row(bt, i);
      for (int64_t d = 0; d < f.cols(); ++d) CHECK(f.at(0, d) == 0.0);
    }
  }

  // every info node has exactly one target
  const int32_t it = s.node_type_id("info");
  for (int64_t i = 0; i < g.num_nodes(it); ++i)
    CHECK(g.degree(it, i, s.edge_type_id("ti"), Direction::Reverse) == 1);

  // folds: 5 near-equal, disjoint (validated above), deterministic sizes
  REQUIRE(r.dataset.folds.size() == 5);
  for (const auto& f : r.dataset.folds) CHECK(f.size() == 40);
}

TEST_CASE("the trace records every latent draw consistently with the graph") {
  SynthResult r = generate(small_config(2, 11, 50));
  const auto& tr = r.trace;
  REQUIRE(tr.component_means.size() == 5);
  REQUIRE(tr.class_mixtures.size() == 3);
  for (const auto& mix : tr.class_mixtures) {
    double sum = 0.0;
    for (double w : mix) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  REQUIRE(tr.bridge_multinomials.size() == 3);  // one per class
  for (const auto& per_class : tr.bridge_multinomials) {
    REQUIRE(per_class.size() == 3);
    for (size_t b = 0; b < 3; ++b)
      CHECK(per_class[b].size() ==
            static_cast<size_t>(tr.bridge_counts[b]));
  }

  const HeteroGraph& g = r.dataset.graph;
  const Schema& s = g.schema();
  const int32_t tt = s.node_type_id("target");
  for (int64_t t = 0; t < 50; ++t) {
    for (int b = 0; b < 3; ++b) {
      const int32_t e = s.edge_type_id(b == 0 ? "ta" : b == 1 ? "tb" : "tc");
      auto nb = g.neighbors(tt, t, e, Direction::Forward);
      REQUIRE(nb.size() == 1);
      CHECK(nb[0] == tr.target_bridge_choice[static_cast<size_t>(t)][static_cast<size_t>(b)]);
    }
    CHECK(tr.info_components[static_cast<size_t>(t)].size() ==
          static_cast<size_t>(tr.info_counts[static_cast<size_t>(t)]));
  }
}

TEST_CASE("regeneration is byte-identical on disk, trace included") {
  fs::path d1 = fresh_dir("dhg_synth_a");
  fs::path d2 = fresh_dir("dhg_synth_b");
  SynthResult r1 = generate(small_config(4, 21, 60));
  SynthResult r2 = generate(small_config(4, 21, 60));
  save_dataset(d1.string(), r1.dataset);
  save_dataset(d2.string(), r2.dataset);
  save_trace((d1 / "trace.json").string(), r1.trace);
  save_trace((d2 / "trace.json").string(), r2.trace);

  std::set<std::string> names1, names2;
  for (const auto& e : fs::directory_iterator(d1)) names1.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(d2)) names2.insert(e.path().filename().string());
  REQUIRE(names1 == names2);
  CHECK(names1.count("schema.json") == 1);
  CHECK(names1.count("trace.json") == 1);
  for (const auto& name : names1) CHECK(slurp(d1 / name) == slurp(d2 / name));

  // a different seed must change the data
  SynthResult r3 = generate(small_config(4, 22, 60));
  fs::path d3 = fresh_dir("dhg_synth_c");
  save_dataset(d3.string(), r3.dataset);
  CHECK(slurp(d1 / "nodes_target.tsv") != slurp(d3 / "nodes_target.tsv"));

  // round-trip: saved dataset loads back and the trace parses
  Dataset back = load_dataset(d1.string());
  CHECK(back.graph.total_nodes() == r1.dataset.graph.total_nodes());
  CHECK(back.graph.total_edges() == r1.dataset.graph.total_edges());
  GeneratorTrace tr = load_trace((d1 / "trace.json").string());
  CHECK(tr.component_means == r1.trace.component_means);
  CHECK(tr.class_mixtures == r1.trace.class_mixtures);
  CHECK(tr.info_counts == r1.trace.info_counts);
  CHECK(tr.config.seed == 21);

  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
}

TEST_CASE("family ten's mean info degree concentrates near ten") {
  SynthConfig c = small_config(10, 5, 2000);
  SynthResult r = generate(c);
  double total = 0.0;
  for (int64_t j : r.trace.info_counts) total += static_cast<double>(j);
  const double mean = total / 2000.0;
  CHECK(mean >= 9.5);
  CHECK(mean <= 10.5);
}

TEST_CASE("posterior: separated mixtures give a near-one-hot answer") {
  GeneratorTrace tr;
  tr.component_means = {{100.0, 100.0}, {-100.0, -100.0}};
  tr.class_mixtures = {{1.0, 0.0}, {0.0, 1.0}};  // class 0 -> comp 0, class 1 -> comp 1
  auto post = bayes_posterior(tr, {{100.2, 99.9}});
  REQUIRE(post.size() == 2);
  CHECK(post[0] > 0.999999);
  CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("posterior: identical class mixtures are uninformative") {
  GeneratorTrace tr;
  tr.component_means = {{1.0, 0.0}, {0.0, 1.0}};
  tr.class_mixtures = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  auto post = bayes_posterior(tr, {{0.3, -0.4}, {1.2, 0.1}});
  REQUIRE(post.size() == 3);
  for (double p : post) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("posterior matches a linear-domain brute force on small instances") {
  // Low dimension keeps the direct product away from underflow, so the two
  // computations are genuinely independent (log domain vs probability domain).
  GeneratorTrace tr;
  tr.component_means = {{0.5, -0.3}, {-1.0, 0.8}, {2.0, 0.0}};
  tr.class_mixtures = {{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}};
  std::vector<std::vector<double>> bag = {{0.4, 0.2}, {-0.9, 1.0}, {1.5, -0.5}};

  auto post = bayes_posterior(tr, bag);

  std::vector<double> lin(2, 1.0);
  for (const auto& x : bag) {
    for (size_t c = 0; c < 2; ++c) {
      double like = 0.0;
      for (size_t k = 0; k < 3; ++k) {
        double d2 = 0.0;
        for (size_t i = 0; i < 2; ++i)
          d2 += (x[i] - tr.component_means[k][i]) * (x[i] - tr.component_means[k][i]);
        like += tr.class_mixtures[c][k] * std::exp(-0.5 * d2);
      }
      lin[c] *= like;
    }
  }
  const double z = lin[0] + lin[1];
  CHECK(post[0] == doctest::Approx(lin[0] / z).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(lin[1] / z).epsilon(1e-12));
}

TEST_CASE("denser ego-networks give the oracle more evidence") {
  double acc1 = 0.0, acc8 = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    SynthResult a = generate(small_config(1, seed, 400));
    SynthResult b = generate(small_config(8, seed, 400));
    acc1 += bayes_accuracy(a.dataset, a.trace);
    acc8 += bayes_accuracy(b.dataset, b.trace);
  }
  acc1 /= 5.0;
  acc8 /= 5.0;
  CHECK(acc8 >= acc1);
  CHECK(acc1 > 1.0 / 3.0);  // even one info node beats the uniform guess
}

TEST_CASE("feature bags hold the target row plus its info rows") {
  SynthResult r = generate(small_config(2, 3, 20));
  const HeteroGraph& g = r.dataset.graph;
  auto bag = target_feature_bag(g, 0);
  REQUIRE(bag.size() ==
          1 + static_cast<size_t>(r.trace.info_counts[0]));
  Tensor own = g.feature_row(g.schema().node_type_id("target"), 0);
  for (int64_t d = 0; d < own.cols(); ++d) CHECK(bag[0][static_cast<size_t>(d)] == own.at(0, d));
}
