#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twoforest/exact.hpp"
#include "twoforest/graph.hpp"

namespace twoforest {

inline constexpr std::size_t kMaxCensusEdges = 24;

struct CensusTree {
  std::vector<EdgeId> edges;
  Rational weight;
};

struct CensusForest {
  std::vector<EdgeId> edges;
  std::vector<Vertex> floating;        // Sigma, sorted
  std::vector<EdgeId> boundary;        // dSigma, sorted
  Rational weight;                     // product of conductances
  Rational boundary_conductance;       // |dSigma|, conductance weighted
};

/// Every spanning tree and two-component spanning forest of a small graph,
/// with exact weights. Both lists are in lexicographic order of their
/// edge-id tuples.
struct ExactCensus {
  WeightedGraph graph;
  std::vector<CensusTree> trees;
  std::vector<CensusForest> two_forests;
  Rational kappa{0};
  Rational kappa2{0};
};

namespace detail {

class CensusBuilder {
 public:
  explicit CensusBuilder(const WeightedGraph& g)
      : g_(g), sets_(g.vertex_count()), conductance_(g.edge_count()) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) conductance_[e] = to_rational(g.edge(e).c);
  }

  void run(ExactCensus& out) {
    out_ = &out;
    const std::size_t n = g_.vertex_count();
    tree_size_ = n - 1;
    forest_size_ = n >= 2 ? n - 2 : static_cast<std::size_t>(-1);
    visit(0, Rational(1));
  }

 private:
  void record(const Rational& weight) {
    const std::size_t k = chosen_.size();
    if (k == forest_size_) {
      CensusForest f;
      f.edges = chosen_;
      f.weight = weight;
      const std::size_t root_b = sets_.find(g_.boundary());
      std::vector<char> mask(g_.vertex_count(), 0);
      for (Vertex v = 0; v < g_.vertex_count(); ++v) {
        if (sets_.find(v) != root_b) {
          mask[v] = 1;
          f.floating.push_back(v);
        }
      }
      f.boundary = cut_edges(g_, mask);
      f.boundary_conductance = 0;
      for (EdgeId e : f.boundary) f.boundary_conductance += conductance_[e];
      out_->kappa2 += weight;
      out_->two_forests.push_back(std::move(f));
    }
    if (k == tree_size_) {
      out_->kappa += weight;
      out_->trees.push_back({chosen_, weight});
    }
  }

  void visit(EdgeId next, const Rational& weight) {
    record(weight);
    if (chosen_.size() == tree_size_) return;
    const std::size_t min_target = forest_size_ == static_cast<std::size_t>(-1) ? tree_size_ : forest_size_;
    const std::size_t needed = chosen_.size() >= min_target ? 1 : min_target - chosen_.size();
    for (EdgeId e = next; e < g_.edge_count(); ++e) {
      if (g_.edge_count() - e < needed) break;
      const Edge& edge = g_.edge(e);
      if (!sets_.unite(edge.u, edge.v)) continue;
      chosen_.push_back(e);
      visit(e + 1, weight * conductance_[e]);
      chosen_.pop_back();
      sets_.rollback();
    }
  }

  const WeightedGraph& g_;
  RollbackDisjointSets sets_;
  std::vector<Rational> conductance_;
  std::vector<EdgeId> chosen_;
  std::size_t tree_size_ = 0;
  std::size_t forest_size_ = 0;
  ExactCensus* out_ = nullptr;
};

}  // namespace detail

/// Brute-force census over acyclic edge subsets.
inline ExactCensus enumerate(const WeightedGraph& g, std::size_t max_edges = kMaxCensusEdges) {
  if (g.edge_count() > max_edges)
    throw Error(ErrorKind::TooLarge, "census needs at most " + std::to_string(max_edges) + " edges, graph has " +
                                         std::to_string(g.edge_count()));
  ExactCensus census{g, {}, {}, Rational(0), Rational(0)};
  detail::CensusBuilder(g).run(census);
  return census;
}

enum class StatisticId {
  Kappa,
  Ratio,
  ProbInSigma,
  ProbPair,
  ProbConditional,
  ProbEdgeSeparates,
  ExpectedBoundary,
  MeanSize,
  SecondMoment,
  PinnedMean,
};

inline constexpr StatisticId kAllStatistics[] = {
    StatisticId::Kappa,           StatisticId::Ratio,         StatisticId::ProbInSigma,
    StatisticId::ProbPair,        StatisticId::ProbConditional, StatisticId::ProbEdgeSeparates,
    StatisticId::ExpectedBoundary, StatisticId::MeanSize,     StatisticId::SecondMoment,
    StatisticId::PinnedMean,
};

constexpr std::string_view to_string(StatisticId id) {
  switch (id) {
    case StatisticId::Kappa: return "kappa";
    case StatisticId::Ratio: return "ratio";
    case StatisticId::ProbInSigma: return "prob_in_sigma";
    case StatisticId::ProbPair: return "prob_pair";
    case StatisticId::ProbConditional: return "prob_conditional";
    case StatisticId::ProbEdgeSeparates: return "prob_edge_separates";
    case StatisticId::ExpectedBoundary: return "expected_boundary";
    case StatisticId::MeanSize: return "mean_size";
    case StatisticId::SecondMoment: return "second_moment";
    case StatisticId::PinnedMean: return "pinned_mean";
  }
  return "unknown";
}

inline StatisticId parse_statistic(std::string_view name) {
  for (StatisticId id : kAllStatistics)
    if (to_string(id) == name) return id;
  throw Error(ErrorKind::UnknownStatistic, "unknown statistic '" + std::string(name) + "'");
}

/// Number of vertex/edge arguments a statistic takes.
constexpr std::size_t statistic_arity(StatisticId id) {
  switch (id) {
    case StatisticId::ProbInSigma:
    case StatisticId::ProbEdgeSeparates:
    case StatisticId::PinnedMean: return 1;
    case StatisticId::ProbPair:
    case StatisticId::ProbConditional: return 2;
    default: return 0;
  }
}

namespace detail {
inline bool contains(const std::vector<Vertex>& sorted, Vertex v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

inline void require_interior(const WeightedGraph& g, Vertex v) {
  g.check_vertex(v);
  if (v == g.boundary()) throw Error(ErrorKind::InvalidVertex, "statistic undefined at the boundary vertex");
}
}  // namespace detail

/// Exact value of a statistic by direct summation over the census.
/// Arguments: prob_in_sigma(u), prob_pair(u, v), prob_conditional(v, u) =
/// P(v | u), prob_edge_separates(e), pinned_mean(z0).
inline Rational exact_statistic(const ExactCensus& census, StatisticId id, std::span<const std::size_t> args = {}) {
  const WeightedGraph& g = census.graph;
  if (args.size() != statistic_arity(id))
    throw Error(ErrorKind::UnknownStatistic,
                std::string(to_string(id)) + " takes " + std::to_string(statistic_arity(id)) + " argument(s)");
  auto forest_sum = [&](auto&& value) {
    Rational total(0);
    for (const CensusForest& f : census.two_forests) total += f.weight * value(f);
    return total;
  };
  switch (id) {
    case StatisticId::Kappa: return census.kappa;
    case StatisticId::Ratio: return census.kappa2 / census.kappa;
    case StatisticId::ProbInSigma: {
      detail::require_interior(g, args[0]);
      return forest_sum([&](const CensusForest& f) { return Rational(int(detail::contains(f.floating, args[0]))); }) /
             census.kappa2;
    }
    case StatisticId::ProbPair: {
      detail::require_interior(g, args[0]);
      detail::require_interior(g, args[1]);
      return forest_sum([&](const CensusForest& f) {
               return Rational(int(detail::contains(f.floating, args[0]) && detail::contains(f.floating, args[1])));
             }) /
             census.kappa2;
    }
    case StatisticId::ProbConditional: {
      const Vertex v = args[0];
      const Vertex u = args[1];
      detail::require_interior(g, u);
      g.check_vertex(v);
      const Rational joint = forest_sum([&](const CensusForest& f) {
        return Rational(int(detail::contains(f.floating, u) && detail::contains(f.floating, v)));
      });
      const Rational marginal =
          forest_sum([&](const CensusForest& f) { return Rational(int(detail::contains(f.floating, u))); });
      return joint / marginal;
    }
    case StatisticId::ProbEdgeSeparates: {
      const EdgeId e = args[0];
      g.edge(e);
      return forest_sum([&](const CensusForest& f) {
               return Rational(int(std::binary_search(f.boundary.begin(), f.boundary.end(), e)));
             }) /
             census.kappa2;
    }
    case StatisticId::ExpectedBoundary:
      return forest_sum([](const CensusForest& f) { return f.boundary_conductance; }) / census.kappa2;
    case StatisticId::MeanSize:
      return forest_sum([](const CensusForest& f) { return Rational(f.floating.size()); }) / census.kappa2;
    case StatisticId::SecondMoment:
      return forest_sum([](const CensusForest& f) {
               const Rational s(f.floating.size());
               return s * s;
             }) /
             census.kappa2;
    case StatisticId::PinnedMean: {
      const Vertex z0 = args[0];
      detail::require_interior(g, z0);
      const Rational weighted_size = forest_sum([&](const CensusForest& f) {
        return detail::contains(f.floating, z0) ? Rational(f.floating.size()) : Rational(0);
      });
      const Rational mass =
          forest_sum([&](const CensusForest& f) { return Rational(int(detail::contains(f.floating, z0))); });
      return weighted_size / mass;
    }
  }
  throw Error(ErrorKind::UnknownStatistic, "unhandled statistic");
}

/// Closed-form value of the same statistic, for side-by-side verification.
inline double formula_statistic(const ForestAnalyzer& a, StatisticId id, std::span<const std::size_t> args = {}) {
  if (args.size() != statistic_arity(id))
    throw Error(ErrorKind::UnknownStatistic,
                std::string(to_string(id)) + " takes " + std::to_string(statistic_arity(id)) + " argument(s)");
  switch (id) {
    case StatisticId::Kappa: return std::exp(a.log_kappa());
    case StatisticId::Ratio: return a.ratio();
    case StatisticId::ProbInSigma: return a.prob_in_sigma(args[0]);
    case StatisticId::ProbPair: return a.prob_pair(args[0], args[1]);
    case StatisticId::ProbConditional: return a.prob_conditional(args[0], args[1]);
    case StatisticId::ProbEdgeSeparates: return a.prob_edge_separates(args[0]);
    case StatisticId::ExpectedBoundary: return a.expected_boundary();
    case StatisticId::MeanSize: return a.size_moments().mean;
    case StatisticId::SecondMoment: return a.size_moments().second_moment;
    case StatisticId::PinnedMean: return a.pinned_mean_size(args[0]);
  }
  throw Error(ErrorKind::UnknownStatistic, "unhandled statistic");
}

}  // namespace twoforest
