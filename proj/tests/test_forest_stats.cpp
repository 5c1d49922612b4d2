#include <gtest/gtest.h>

#include <cmath>

#include "support/corpus.hpp"
#include "support/oracles.hpp"
#include "twoforest/enumerate.hpp"
#include "twoforest/exact.hpp"
#include "twoforest/forest_stats.hpp"

using namespace twoforest;

namespace {

constexpr double kTight = 1e-12;

bool relative_near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Ratio, WorkedExamples) {
  EXPECT_NEAR(ForestAnalyzer(tf_test::c4()).ratio(), 1.5, kTight);
  EXPECT_NEAR(ForestAnalyzer(tf_test::k3()).ratio(), 1.0, kTight);
  for (const auto [c1, c2] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {3.0, 7.0}})
    EXPECT_NEAR(ForestAnalyzer(tf_test::path(c1, c2)).ratio(), 1.0 / c1 + 1.0 / c2, kTight);
}

TEST(Ratio, C4PerEdgeTerms) {
  const WeightedGraph g = tf_test::c4();
  const PotentialKernel k = potential_kernel(g, g.boundary());
  const double expected[] = {9.0 / 16, 3.0 / 16, 3.0 / 16, 9.0 / 16};
  for (EdgeId e = 0; e < 4; ++e) {
    const double a = k.forward[e], b = k.backward[e];
    EXPECT_NEAR(a * b + (a - b) * (a - b), expected[e], kTight);
  }
}

TEST(Ratio, StrictPaperRuleOnlyDiffersWhenWeighted) {
  ForestOptions strict;
  strict.rule = RatioRule::StrictPaper;
  EXPECT_NEAR(ForestAnalyzer(tf_test::c4(), strict).ratio(), 1.5, kTight);
  const WeightedGraph weighted = tf_test::path(2.0, 0.5);
  EXPECT_NEAR(ForestAnalyzer(weighted).ratio(), 2.5, kTight);
  // unweighted sum: (1/2)^2 + 2^2
  EXPECT_NEAR(ForestAnalyzer(weighted, strict).ratio(), 4.25, kTight);
}

TEST(Probabilities, WorkedExamples) {
  const ForestAnalyzer k3(tf_test::k3());
  EXPECT_NEAR(k3.prob_in_sigma(0), 2.0 / 3.0, kTight);
  EXPECT_NEAR(k3.prob_pair(0, 1), 1.0 / 3.0, kTight);
  EXPECT_NEAR(k3.prob_edge_separates(1), 2.0 / 3.0, kTight);
  EXPECT_NEAR(k3.expected_boundary(), 2.0, kTight);

  const ForestAnalyzer c4(tf_test::c4());
  EXPECT_NEAR(c4.prob_in_sigma(2), 2.0 / 3.0, kTight);
  EXPECT_NEAR(c4.prob_pair(1, 3), 1.0 / 6.0, kTight);
  EXPECT_NEAR(c4.prob_pair(1, 1), c4.prob_in_sigma(1), kTight);
  EXPECT_NEAR(c4.prob_conditional(1, 2), 0.5, kTight);
  EXPECT_EQ(c4.prob_conditional(2, 2), 1.0);
  EXPECT_EQ(c4.prob_conditional(0, 2), 0.0);
  EXPECT_NEAR(c4.prob_edge_separates(1), 0.5, kTight);
  EXPECT_NEAR(c4.expected_boundary(), 2.0, kTight);

  const ForestAnalyzer path(tf_test::path());
  EXPECT_NEAR(path.prob_in_sigma(0), 1.0, kTight);
  EXPECT_NEAR(path.prob_edge_separates(0), 0.5, kTight);
  EXPECT_NEAR(path.prob_edge_separates(1), 0.5, kTight);
  EXPECT_NEAR(path.expected_boundary(), 1.0, kTight);
}

TEST(Probabilities, BoundaryArgumentsRejected) {
  const ForestAnalyzer c4(tf_test::c4());
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ParseError;
  };
  EXPECT_EQ(kind([&] { (void)c4.prob_in_sigma(0); }), ErrorKind::InvalidVertex);
  EXPECT_EQ(kind([&] { (void)c4.prob_pair(1, 0); }), ErrorKind::InvalidVertex);
  EXPECT_EQ(kind([&] { (void)c4.prob_conditional(1, 0); }), ErrorKind::InvalidVertex);
  EXPECT_EQ(kind([&] { (void)c4.pinned_mean_size(0); }), ErrorKind::InvalidVertex);
  EXPECT_EQ(kind([&] { (void)c4.prob_edge_separates(9); }), ErrorKind::UnknownEdge);
}

TEST(Moments, WorkedExamples) {
  const ForestAnalyzer c4(tf_test::c4());
  const SizeMoments m = c4.size_moments();
  EXPECT_NEAR(m.mean, 5.0 / 3.0, kTight);
  EXPECT_NEAR(m.second_moment, 10.0 / 3.0, kTight);
  EXPECT_NEAR(m.mean_resistance, 5.0 / 8.0, kTight);
  const ForestStatistics s = c4.statistics();
  EXPECT_NEAR(s.ell_star * 4.0 / 3.0 * s.mean_resistance, s.mean_size, kTight);

  const SizeMoments k3 = ForestAnalyzer(tf_test::k3()).size_moments();
  EXPECT_NEAR(k3.mean, 4.0 / 3.0, kTight);
  EXPECT_NEAR(k3.second_moment, 2.0, kTight);
}

TEST(Moments, PinnedExamples) {
  EXPECT_NEAR(ForestAnalyzer(tf_test::c4()).pinned_mean_size(2), 2.0, kTight);
  EXPECT_NEAR(ForestAnalyzer(tf_test::path()).pinned_mean_size(0), 1.5, kTight);
}

// prob_in_sigma on a cycle peaks at the vertex opposite b.
TEST(Probabilities, CycleMonotoneAwayFromBoundary) {
  for (std::size_t n : {5u, 6u, 9u, 12u}) {
    const ForestAnalyzer a(tf_test::cycle(n, 0));
    for (Vertex v = 1; v < n; ++v) {
      const std::size_t d = std::min<std::size_t>(v, n - v);
      const std::size_t next = v + 1;
      if (next >= n) break;
      const std::size_t d_next = std::min<std::size_t>(next, n - next);
      if (d_next > d) EXPECT_GT(a.prob_in_sigma(next), a.prob_in_sigma(v));
      if (d_next == d) EXPECT_NEAR(a.prob_in_sigma(next), a.prob_in_sigma(v), kTight);
    }
  }
}

class ForestCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { corpus_ = new std::vector<tf_test::CorpusGraph>(tf_test::small_corpus()); }
  static void TearDownTestSuite() { delete corpus_; }
  static std::vector<tf_test::CorpusGraph>* corpus_;
};
std::vector<tf_test::CorpusGraph>* ForestCorpus::corpus_ = nullptr;

// Every closed-form statistic agrees with plain subset enumeration.
TEST_F(ForestCorpus, MatchesBruteForce) {
  for (const auto& [name, g] : *corpus_) {
    const tf_test::BruteForce ref(g);
    const ForestAnalyzer a(g);
    const Vertex b = g.boundary();
    const std::size_t n = g.vertex_count();
    ASSERT_TRUE(relative_near(a.ratio(), ref.kappa2 / ref.kappa, 1e-9)) << name;
    EXPECT_TRUE(relative_near(a.log_kappa2(), std::log(ref.kappa2), 1e-9)) << name;
    for (Vertex u = 0; u < n; ++u) {
      if (u == b) continue;
      const double pu = ref.expect([&](const auto& f) { return double(f.floating[u]); });
      EXPECT_TRUE(relative_near(a.prob_in_sigma(u), pu, 1e-9)) << name << " u=" << u;
      double pinned_num = ref.expect([&](const auto& f) { return f.floating[u] ? double(f.size) : 0.0; });
      EXPECT_TRUE(relative_near(a.pinned_mean_size(u), pinned_num / pu, 1e-9)) << name;
      for (Vertex v = 0; v < n; ++v) {
        if (v == b) {
          EXPECT_EQ(a.prob_conditional(v, u), 0.0);
          continue;
        }
        const double puv = ref.expect([&](const auto& f) { return double(f.floating[u] && f.floating[v]); });
        EXPECT_TRUE(relative_near(a.prob_pair(u, v), puv, 1e-9)) << name;
        EXPECT_TRUE(relative_near(a.prob_conditional(v, u), puv / pu, 1e-9)) << name;
      }
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const double pe = ref.expect([&](const auto& f) { return double(f.floating[g.edge(e).u] != f.floating[g.edge(e).v]); });
      EXPECT_TRUE(relative_near(a.prob_edge_separates(e), pe, 1e-9)) << name << " e=" << e;
    }
    EXPECT_TRUE(relative_near(a.expected_boundary(), ref.expect([](const auto& f) { return f.boundary_conductance; }), 1e-9))
        << name;
    const SizeMoments m = a.size_moments();
    EXPECT_TRUE(relative_near(m.mean, ref.expect([](const auto& f) { return double(f.size); }), 1e-9)) << name;
    EXPECT_TRUE(relative_near(m.second_moment, ref.expect([](const auto& f) { return double(f.size * f.size); }), 1e-9))
        << name;
  }
}

// The same statistics via the exact rational census.
TEST_F(ForestCorpus, MatchesExactCensus) {
  for (std::size_t i = 0; i < corpus_->size(); i += 3) {
    const auto& [name, g] = (*corpus_)[i];
    const ExactCensus census = enumerate(g);
    const ForestAnalyzer a(g);
    for (StatisticId id : kAllStatistics) {
      std::vector<std::vector<std::size_t>> arg_sets;
      const std::size_t arity = statistic_arity(id);
      if (arity == 0) arg_sets.push_back({});
      if (id == StatisticId::ProbEdgeSeparates)
        for (EdgeId e = 0; e < g.edge_count(); ++e) arg_sets.push_back({e});
      else if (arity == 1)
        for (Vertex u = 0; u < g.vertex_count(); ++u)
          if (u != g.boundary()) arg_sets.push_back({u});
      if (arity == 2)
        for (Vertex u = 0; u < g.vertex_count(); ++u)
          for (Vertex v = 0; v < g.vertex_count(); ++v)
            if (u != g.boundary() && v != g.boundary()) arg_sets.push_back({u, v});
      for (const auto& args : arg_sets) {
        const double exact = to_double(exact_statistic(census, id, args));
        const double formula = formula_statistic(a, id, args);
        EXPECT_TRUE(relative_near(formula, exact, 1e-9)) << name << " " << to_string(id);
      }
    }
  }
}

TEST_F(ForestCorpus, RootInvariance) {
  for (const auto& [name, g] : *corpus_) {
    const double base = ratio_k2_over_k(g);
    for (Vertex r = 0; r < g.vertex_count(); ++r) EXPECT_TRUE(relative_near(ratio_k2_over_k(g, r), base, 1e-9)) << name;
  }
}

TEST_F(ForestCorpus, Identities) {
  for (const auto& [name, g] : *corpus_) {
    const ForestAnalyzer a(g);
    const std::size_t n = g.vertex_count();
    const ForestStatistics s = a.statistics();

    double pair_total = 0.0;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = 0; v < n; ++v)
        if (u != g.boundary() && v != g.boundary()) pair_total += a.prob_pair(u, v);
    EXPECT_TRUE(relative_near(pair_total, s.second_moment, 1e-12)) << name;

    double separated = 0.0;
    for (EdgeId e = 0; e < g.edge_count(); ++e) separated += g.edge(e).c * a.prob_edge_separates(e);
    EXPECT_TRUE(relative_near(separated, s.ell_star, 1e-12)) << name;

    EXPECT_TRUE(relative_near(s.ell_star * s.ratio_k2_k, double(n - 1), 1e-12)) << name;
    EXPECT_LE(s.mean_size * s.mean_size, s.second_moment * (1 + 1e-12)) << name;
    EXPECT_GT(s.mean_size, 0.0);
    EXPECT_LT(s.mean_size, double(n));
    const double scale = double(n) / double(n - 1);
    EXPECT_TRUE(relative_near(s.ell_star * scale * s.mean_resistance, s.mean_size, 1e-12)) << name;
    EXPECT_TRUE(relative_near(s.ell_star * scale * s.hitting_sum, s.second_moment, 1e-12)) << name;

    for (Vertex z = 0; z < n; ++z) {
      if (z == g.boundary()) continue;
      const double pinned = a.pinned_mean_size(z);
      EXPECT_GE(pinned, 1.0 - 1e-12) << name;
      EXPECT_LE(pinned, double(n - 1) + 1e-12) << name;
      EXPECT_GE(a.prob_in_sigma(z), 0.0);
      EXPECT_LE(a.prob_in_sigma(z), 1.0 + 1e-12);
    }
  }
}

TEST_F(ForestCorpus, StrictRuleAgreesOnUnitConductances) {
  ForestOptions strict;
  strict.rule = RatioRule::StrictPaper;
  for (const auto& [name, g] : *corpus_) {
    bool unit = true;
    for (const Edge& e : g.edges()) unit = unit && e.c == 1.0;
    const double weighted = ForestAnalyzer(g).ratio();
    const double literal = ForestAnalyzer(g, strict).ratio();
    if (unit) EXPECT_TRUE(relative_near(literal, weighted, 1e-12)) << name;
  }
}

TEST(Exact, UnitGraphRatiosAreExactRationals) {
  EXPECT_EQ(exact_ratio(tf_test::c4()), Rational(3, 2));
  EXPECT_EQ(exact_ratio(tf_test::k3()), Rational(1));
  EXPECT_EQ(exact_ratio(tf_test::path(2.0, 0.5)), Rational(5, 2));
  EXPECT_EQ(exact_ratio(tf_test::path(2.0, 0.5), RatioRule::StrictPaper), Rational(17, 4));
}
