#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "twoforest/exact.hpp"
#include "twoforest/forest_stats.hpp"
#include "twoforest/graph.hpp"

using namespace twoforest;
using tf_test::c4;
using tf_test::k3;

TEST(BuildGraph, TriangleFromLabels) {
  const std::vector<LabeledEdge> edges{{"v1", "v2"}, {"v2", "v3"}, {"v3", "v1"}};
  const WeightedGraph g = build_graph(std::span<const LabeledEdge>(edges), "v3");
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.label(g.boundary()), "v3");
}

TEST(BuildGraph, PathHasTwoEdges) {
  const std::vector<LabeledEdge> edges{{"u", "v"}, {"v", "b"}};
  const WeightedGraph g = build_graph(std::span<const LabeledEdge>(edges), "b");
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.incident(*g.find_label("v")).size(), 2u);
}

TEST(BuildGraph, Rejections) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::ParseError;
  };
  const std::vector<LabeledEdge> loop{{"u", "u", 1.0}, {"u", "b", 1.0}};
  EXPECT_EQ(kind_of([&] { build_graph(std::span<const LabeledEdge>(loop), "b"); }), ErrorKind::SelfLoop);
  EXPECT_EQ(kind_of([] { build_graph(4, {{0, 1, 1}, {2, 3, 1}}, 0); }), ErrorKind::DisconnectedGraph);
  EXPECT_EQ(kind_of([] { build_graph(2, {{0, 1, 0.0}}, 0); }), ErrorKind::NonpositiveConductance);
  EXPECT_EQ(kind_of([] { build_graph(2, {{0, 1, -1.0}}, 0); }), ErrorKind::NonpositiveConductance);
  EXPECT_EQ(kind_of([] { build_graph(2, {{0, 1, std::numeric_limits<double>::infinity()}}, 0); }),
            ErrorKind::NonpositiveConductance);
  EXPECT_EQ(kind_of([] { build_graph(2, {{0, 1, 1}}, 5); }), ErrorKind::InvalidBoundary);
  const std::vector<LabeledEdge> edges{{"u", "v"}};
  EXPECT_EQ(kind_of([&] { build_graph(std::span<const LabeledEdge>(edges), "w"); }), ErrorKind::InvalidBoundary);
  EXPECT_EQ(kind_of([] { build_graph(std::span<const LabeledEdge>{}, "b"); }), ErrorKind::EmptyGraph);
}

TEST(BuildGraph, ParallelEdgesKeptDistinct) {
  const WeightedGraph g = build_graph(2, {{0, 1, 1}, {0, 1, 2}}, 0);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_DOUBLE_EQ(g.conductance_degree(0), 3.0);
}

TEST(Contract, TriangleBecomesDoubleEdge) {
  const WeightedGraph g = k3();  // b = 2
  const Contraction c = contract(g, 0, 2);
  EXPECT_EQ(c.graph.vertex_count(), 2u);
  EXPECT_EQ(c.graph.edge_count(), 2u);
  EXPECT_EQ(c.graph.edge(0).u + c.graph.edge(0).v, c.graph.edge(1).u + c.graph.edge(1).v);
  EXPECT_EQ(c.graph.boundary(), c.vertex_map[2]);
  // each parallel edge is a spanning tree
  EXPECT_EQ(exact_kappa(c.graph), Rational(2));
}

TEST(Contract, MergedVertexIsGone) {
  const Contraction c = contract(k3(), 0, 1);
  EXPECT_EQ(c.graph.vertex_count(), 2u);
  EXPECT_THROW(contract(c.graph, 0, 0), Error);
  try {
    contract(c.graph, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidVertex);
  }
}

TEST(Pin, AddsOneUnitEdgeToBoundary) {
  const WeightedGraph g = tf_test::path();  // u=0, v=1, b=2
  const Pinned p = pin(g, 0);
  EXPECT_EQ(p.graph.edge_count(), g.edge_count() + 1);
  const Edge& e = p.graph.edge(p.pin_edge);
  EXPECT_TRUE(e.touches(0) && e.touches(2));
  EXPECT_EQ(e.c, 1.0);
  // the path plus u-b is a triangle
  EXPECT_EQ(exact_kappa(p.graph), Rational(3));
  try {
    pin(g, 2);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::InvalidVertex);
  }
}

TEST(Classify, CycleExamples) {
  const WeightedGraph g = c4();  // edges: 0 b-v1, 1 v1-v2, 2 v2-v3, 3 v3-b
  const std::vector<EdgeId> forest{0, 2};
  const SubgraphClass f = classify_subgraph(g, forest);
  ASSERT_EQ(f.kind, SubgraphKind::TwoForest);
  EXPECT_EQ(f.floating, (std::vector<Vertex>{2, 3}));
  EXPECT_EQ(f.boundary_edges, (std::vector<EdgeId>{1, 3}));

  const std::vector<EdgeId> tree{0, 1, 2};
  EXPECT_EQ(classify_subgraph(g, tree).kind, SubgraphKind::SpanningTree);
  const std::vector<EdgeId> all{0, 1, 2, 3};
  EXPECT_EQ(classify_subgraph(g, all).kind, SubgraphKind::Other);
}

// classify_subgraph agrees with plain component counting on every subset of
// |V| - 2 or |V| - 1 edges.
TEST(Classify, MatchesComponentCountOnCorpus) {
  for (const auto& [name, g] : tf_test::small_corpus(120)) {
    const std::size_t n = g.vertex_count();
    for (std::uint32_t mask = 0; mask < (1u << g.edge_count()); ++mask) {
      const auto k = std::size_t(__builtin_popcount(mask));
      if (k + 2 != n && k + 1 != n) continue;
      std::vector<EdgeId> ids;
      for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (mask >> e & 1u) ids.push_back(e);
      int count = 0;
      const auto label = tf_test::components(g, mask, &count);
      const SubgraphClass c = classify_subgraph(g, ids);
      SubgraphKind expected = SubgraphKind::Other;
      if (k + 1 == n && count == 1) expected = SubgraphKind::SpanningTree;
      if (k + 2 == n && count == 2) expected = SubgraphKind::TwoForest;
      ASSERT_EQ(c.kind, expected) << name << " mask " << mask;
      if (expected == SubgraphKind::TwoForest) {
        for (Vertex v = 0; v < n; ++v) {
          const bool floating = label[v] != label[g.boundary()];
          EXPECT_EQ(std::binary_search(c.floating.begin(), c.floating.end(), v), floating);
        }
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
          const bool cut = (label[g.edge(e).u] != label[g.boundary()]) != (label[g.edge(e).v] != label[g.boundary()]);
          EXPECT_EQ(std::binary_search(c.boundary_edges.begin(), c.boundary_edges.end(), e), cut);
        }
      }
    }
  }
}

// kappa(G with u ~ b) / kappa(G) = G_{u,u}.
TEST(Contract, TreeRatioIsGreenDiagonal) {
  for (const auto& [name, g] : tf_test::small_corpus(120)) {
    if (g.vertex_count() < 2) continue;
    const auto green = tf_test::reference_green(g);
    const Rational kappa = exact_kappa(g);
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
      if (u == g.boundary()) continue;
      const Contraction c = contract(g, u, g.boundary());
      const double ratio = to_double(exact_kappa(c.graph) / kappa);
      EXPECT_NEAR(ratio, green[u][u], 1e-12 * std::max(1.0, ratio)) << name;
    }
  }
}

// Trees of pin(G, u) through e_u are 2SFs of G with u floating.
TEST(Pin, PinnedEdgeProbabilityChain) {
  for (const auto& [name, g] : tf_test::small_corpus(60)) {
    const tf_test::BruteForce forests(g);
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
      if (u == g.boundary()) continue;
      const Pinned p = pin(g, u);
      const tf_test::BruteForce pinned(p.graph);
      double through = 0.0;
      for (std::size_t i = 0; i < pinned.trees.size(); ++i)
        if (pinned.trees[i] >> p.pin_edge & 1u) through += pinned.tree_weights[i];
      const double prob_u = forests.expect([&](const auto& f) { return double(f.floating[u]); });
      EXPECT_NEAR(through, prob_u * forests.kappa2, 1e-12 * through) << name;
      const ForestAnalyzer a(p.graph);
      EXPECT_NEAR(a.edge_transfer(p.pin_edge) * pinned.kappa, prob_u * forests.kappa2, 1e-9 * through) << name;
    }
  }
}
