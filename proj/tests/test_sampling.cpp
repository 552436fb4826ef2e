#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dhg/error.hpp"
#include "dhg/graph.hpp"
#include "dhg/rng.hpp"
#include "dhg/sampling.hpp"
#include "dhg/sen.hpp"

using namespace dhg;

namespace {

// Authors linked through papers; returns a graph with the APA metapath
// registered. `coauthors[p] = {a1, a2, ...}` lists the authors of paper p.
HeteroGraph author_paper_graph(int64_t num_authors,
                               const std::vector<std::vector<int64_t>>& coauthors) {
  Schema s;
  s.add_node_type("author", 2);
  s.add_node_type("paper", 2);
  s.add_edge_type("ap", "author", "paper");
  HeteroGraph g(s);
  for (int64_t i = 0; i < num_authors; ++i)
    g.add_node(0, {static_cast<double>(i), 1.0});
  for (size_t p = 0; p < coauthors.size(); ++p) {
    g.add_node(1, {static_cast<double>(p), 2.0});
    for (int64_t a : coauthors[p]) g.add_edge(0, a, static_cast<int64_t>(p));
  }
  g.set_target_type(0, 2);
  for (int64_t i = 0; i < num_authors; ++i) g.set_label(i, i % 2);
  g.register_metapath({"APA", {{0, Direction::Forward}, {0, Direction::Reverse}}});
  g.finalize();
  return g;
}

}  // namespace

TEST_CASE("walks on a two-author paper complete as either coauthor") {
  HeteroGraph g = author_paper_graph(2, {{0, 1}});
  Rng rng(7);
  MetapathInstanceSet set = sample_instances(g, 0, 0, 200, rng);
  CHECK(set.discarded == 0);
  REQUIRE(set.instances.size() == 200);
  int from_self = 0, from_other = 0;
  for (const auto& inst : set.instances) {
    REQUIRE(inst.size() == 3);
    CHECK(inst[1] == 0);  // the single paper
    CHECK(inst[2] == 0);  // destination is always the target
    if (inst[0] == 0) ++from_self;
    if (inst[0] == 1) ++from_other;
  }
  CHECK(from_self + from_other == 200);
  CHECK(from_self > 0);   // cycles back to the target are allowed
  CHECK(from_other > 0);
}

TEST_CASE("isolated target yields an empty set; conservation holds") {
  HeteroGraph g = author_paper_graph(3, {{1, 2}});  // author 0 has no papers
  Rng rng(3);
  MetapathInstanceSet set = sample_instances(g, 0, 0, 20, rng);
  CHECK(set.instances.empty());
  CHECK(set.discarded == 20);
}

TEST_CASE("walk endpoints are uniform over coauthors (3-sigma band)") {
  // one paper shared by authors {0, 1, 2}; walks from 0 end at each
  // coauthor (including 0 itself) with probability 1/3
  HeteroGraph g = author_paper_graph(3, {{0, 1, 2}});
  Rng rng(99);
  const int64_t walks = 10000;
  MetapathInstanceSet set = sample_instances(g, 0, 0, walks, rng);
  REQUIRE(set.instances.size() == static_cast<size_t>(walks));
  std::vector<int64_t> counts(3, 0);
  for (const auto& inst : set.instances) ++counts[static_cast<size_t>(inst[0])];
  const double p = 1.0 / 3.0;
  const double mean = walks * p;
  const double sigma = std::sqrt(walks * p * (1.0 - p));
  for (int64_t c : counts) CHECK(std::fabs(c - mean) <= 3.0 * sigma);
  // in particular the two non-target endpoints are 1:1
  CHECK(std::fabs(counts[1] - counts[2]) <= 3.0 * std::sqrt(walks * 2 * p * (1 - p)));
}

TEST_CASE("non-same-type metapaths are rejected") {
  Schema s;
  s.add_node_type("author", 1);
  s.add_node_type("paper", 1);
  s.add_edge_type("ap", "author", "paper");
  HeteroGraph g(s);
  g.add_node(0, {0.0});
  g.add_node(1, {0.0});
  g.add_edge(0, 0, 0);
  g.set_target_type(0, 2);
  g.set_label(0, 0);
  g.register_metapath({"AP", {{0, Direction::Forward}}});
  g.finalize();
  Rng rng(1);
  CHECK_THROWS_AS(sample_instances(g, 0, 0, 5, rng), ConfigError);
  CHECK_THROWS_AS(sample_instances(g, 0, 0, 0, rng), ConfigError);  // walks < 1
  CHECK_THROWS_AS(sample_instances(g, 7, 0, 5, rng), ConfigError);  // bad id
}

TEST_CASE("instances type-check edge by edge and dead ends are counted") {
  // authors 0,1 share paper 0; author 1 also wrote paper 1 alone — walks
  // through paper 1 can still complete (back to author 1)
  HeteroGraph g = author_paper_graph(4, {{0, 1}, {1}, {2, 3}});
  Rng rng(17);
  for (int64_t a = 0; a < 4; ++a) {
    MetapathInstanceSet set = sample_instances(g, 0, a, 50, rng);
    CHECK(static_cast<int64_t>(set.instances.size()) + set.discarded == 50);
    for (const auto& inst : set.instances) {
      REQUIRE(inst.size() == 3);
      // author -> paper along ap forward, then paper -> author reading back
      auto papers = g.neighbors(0, inst[0], 0, Direction::Forward);
      CHECK(std::find(papers.begin(), papers.end(), inst[1]) != papers.end());
      auto authors = g.neighbors(1, inst[1], 0, Direction::Reverse);
      CHECK(std::find(authors.begin(), authors.end(), inst[2]) != authors.end());
    }
  }
}

TEST_CASE("zero-layer batches carry ego-net samples only") {
  HeteroGraph g = author_paper_graph(3, {{0, 1}, {1, 2}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng rng(5);
  Batch b = build_batch(g, tmpl, {2, 0}, 0, {20, 20}, rng);
  CHECK(b.layers == 0);
  REQUIRE(b.frontiers.size() == 1);
  CHECK(b.frontiers[0] == std::vector<int64_t>{0, 2});
  CHECK(b.instances.empty());
  CHECK(b.sens.size() == 2);
  CHECK(b.sen(0).occs[0].node == 0);
  CHECK_THROWS(b.sen(1));
}

TEST_CASE("one-layer batch pulls the metapath neighbor into the base frontier") {
  HeteroGraph g = author_paper_graph(2, {{0, 1}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng rng(5);
  Batch b = build_batch(g, tmpl, {0}, 1, {20, 20}, rng);
  REQUIRE(b.frontiers.size() == 2);
  CHECK(b.frontiers[1] == std::vector<int64_t>{0});
  CHECK(b.frontiers[0] == std::vector<int64_t>{0, 1});
  CHECK(b.sens.size() == 2);
  CHECK(b.instance_pairs == 1);
  CHECK(b.instance_set(0, 0).instances.size() == 20);
}

TEST_CASE("two-layer batch reaches two metapath hops down a chain") {
  // papers p_i link author i and author i+1: a chain a0-a1-a2-a3-a4
  HeteroGraph g = author_paper_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng rng(5);
  Batch b = build_batch(g, tmpl, {0}, 2, {20, 20}, rng);
  REQUIRE(b.frontiers.size() == 3);
  CHECK(b.frontiers[2] == std::vector<int64_t>{0});
  CHECK(b.frontiers[1] == std::vector<int64_t>{0, 1});
  // two metapath hops = four graph hops: exactly authors {0, 1, 2}
  CHECK(b.frontiers[0] == std::vector<int64_t>{0, 1, 2});

  // breadth-first oracle over the author-paper-author relation
  std::set<int64_t> reach = {0};
  for (int hop = 0; hop < 2; ++hop) {
    std::set<int64_t> next = reach;
    for (int64_t a : reach)
      for (int64_t p : g.neighbors(0, a, 0, Direction::Forward))
        for (int64_t other : g.neighbors(1, p, 0, Direction::Reverse)) next.insert(other);
    reach = next;
  }
  for (int64_t v : b.frontiers[0]) CHECK(reach.count(v) == 1);
}

TEST_CASE("batch closure: every instance source sits in the previous frontier") {
  HeteroGraph g = author_paper_graph(6, {{0, 1, 2}, {2, 3}, {3, 4, 5}, {5, 0}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng rng(41);
  Batch b = build_batch(g, tmpl, {0, 3}, 3, {5, 20}, rng);
  for (int32_t l = b.layers; l >= 1; --l) {
    const auto& cur = b.frontiers[static_cast<size_t>(l)];
    const auto& prev = b.frontiers[static_cast<size_t>(l) - 1];
    // frontiers nest
    for (int64_t u : cur) CHECK(std::binary_search(prev.begin(), prev.end(), u));
    for (int64_t u : cur) {
      const auto& set = b.instance_set(u, 0);
      for (const auto& inst : set.instances)
        CHECK(std::binary_search(prev.begin(), prev.end(), inst.front()));
    }
  }
  // every base-frontier node has its ego-net sample
  for (int64_t u : b.frontiers[0]) CHECK(b.sens.count(u) == 1);
}

TEST_CASE("batches are deterministic given the seed") {
  HeteroGraph g = author_paper_graph(6, {{0, 1, 2}, {2, 3}, {3, 4, 5}, {5, 0}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng r1(8), r2(8), r3(9);
  Batch a = build_batch(g, tmpl, {0, 3}, 2, {5, 20}, r1);
  Batch b = build_batch(g, tmpl, {0, 3}, 2, {5, 20}, r2);
  Batch c = build_batch(g, tmpl, {0, 3}, 2, {5, 20}, r3);
  CHECK(a.frontiers == b.frontiers);
  REQUIRE(a.instances.size() == b.instances.size());
  for (auto ia = a.instances.begin(), ib = b.instances.begin(); ia != a.instances.end();
       ++ia, ++ib) {
    CHECK(ia->first == ib->first);
    CHECK(ia->second.instances == ib->second.instances);
  }
  bool any_diff = a.frontiers != c.frontiers;
  for (auto ia = a.instances.begin(), ic = c.instances.begin();
       !any_diff && ia != a.instances.end() && ic != c.instances.end(); ++ia, ++ic)
    any_diff = ia->second.instances != ic->second.instances;
  CHECK(any_diff);  // a different seed actually changes something
}

TEST_CASE("batch description mentions frontiers and instance counts") {
  HeteroGraph g = author_paper_graph(2, {{0, 1}});
  SenTemplate tmpl = derive_sen_template(g.schema(), 0);
  Rng rng(5);
  Batch b = build_batch(g, tmpl, {0}, 1, {4, 20}, rng);
  const std::string text = describe(b, g);
  CHECK(text.find("1 targets") != std::string::npos);
  CHECK(text.find("frontier 0") != std::string::npos);
  CHECK(text.find("APA") != std::string::npos);
}

TEST_CASE("relational batches cap per-relation samples and close over layers") {
  Schema s;
  s.add_node_type("t", 2);
  s.add_node_type("w", 2);
  s.add_edge_type("tw", "t", "w");
  HeteroGraph g(s);
  Rng build(123);
  for (int i = 0; i < 8; ++i) g.add_node(0, {build.normal(), build.normal()});
  for (int i = 0; i < 40; ++i) g.add_node(1, {build.normal(), build.normal()});
  // target 0 touches 30 w-nodes (over the fanout), the rest touch a few
  for (int i = 0; i < 30; ++i) g.add_edge(0, 0, i);
  for (int i = 1; i < 8; ++i) {
    g.add_edge(0, i, (i * 5) % 40);
    g.add_edge(0, i, (i * 7) % 40);
  }
  g.set_target_type(0, 2);
  for (int i = 0; i < 8; ++i) g.set_label(i, i % 2);
  g.finalize();

  Rng rng(21);
  RgcnBatch b = build_rgcn_batch(g, {0, 1}, 2, {20, 20}, rng);
  REQUIRE(b.frontiers.size() == 3);
  CHECK(b.frontiers[2].size() == 2);

  const auto& caps = b.neighbors_of({0, 0}, 0, Direction::Forward);
  CHECK(caps.size() == 20);  // fanout-capped from 30
  std::set<int64_t> uniq(caps.begin(), caps.end());
  CHECK(uniq.size() == 20);  // distinct

  for (int32_t l = b.layers; l >= 1; --l) {
    const auto& cur = b.frontiers[static_cast<size_t>(l)];
    const auto& prev = b.frontiers[static_cast<size_t>(l) - 1];
    for (TypedNode v : cur) {
      CHECK(std::binary_search(prev.begin(), prev.end(), v));
      for (const auto& [edge, dir] : g.schema().incident(v.type)) {
        const auto& sampled = b.neighbors_of(v, edge, dir);
        const int32_t other = g.schema().step_to(edge, dir);
        for (int64_t u : sampled)
          CHECK(std::binary_search(prev.begin(), prev.end(), TypedNode{other, u}));
      }
    }
  }

  Rng r2(21);
  RgcnBatch b2 = build_rgcn_batch(g, {0, 1}, 2, {20, 20}, r2);
  CHECK(b.frontiers == b2.frontiers);
  CHECK(b.nbrs == b2.nbrs);

  CHECK_THROWS_AS(build_rgcn_batch(g, {}, 1, {20, 20}, rng), ConfigError);
  CHECK_THROWS_AS(build_rgcn_batch(g, {0}, 0, {20, 20}, rng), ConfigError);
}
