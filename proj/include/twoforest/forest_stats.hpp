#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "twoforest/detail/numeric.hpp"
#include "twoforest/green.hpp"

namespace twoforest {

/// How edge terms of the kappa2/kappa potential-kernel sum are weighted.
/// `Weighted` multiplies each term by c(e), which is exact for arbitrary
/// conductances; `StrictPaper` is the unweighted sum, exact only when every
/// conductance is 1.
enum class RatioRule { Weighted, StrictPaper };

struct ForestOptions {
  RatioRule rule = RatioRule::Weighted;
  SolverOptions solver{};
};

/// kappa2/kappa = sum_{uv} w(uv) [A_{u,v} A_{v,u} + (A_{u,v} - A_{v,u})^2].
inline double ratio_from_kernel(const WeightedGraph& g, const PotentialKernel& kernel,
                                RatioRule rule = RatioRule::Weighted) {
  std::vector<double> terms(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const double a = kernel.forward[e];
    const double b = kernel.backward[e];
    const double w = rule == RatioRule::Weighted ? g.edge(e).c : 1.0;
    terms[e] = w * (a * b + (a - b) * (a - b));
  }
  return detail::pairwise_sum(terms);
}

/// Ratio of weighted 2SF count to weighted tree count, from the potential
/// kernel rooted at `root` (default: the graph's boundary). Independent of
/// the root.
inline double ratio_k2_over_k(const WeightedGraph& g, std::optional<Vertex> root = std::nullopt,
                              RatioRule rule = RatioRule::Weighted, SolverOptions solver = {}) {
  const Vertex r = root.value_or(g.boundary());
  return ratio_from_kernel(g, potential_kernel(g, r, solver), rule);
}

struct SizeMoments {
  double mean = 0.0;           // E|Sigma|
  double second_moment = 0.0;  // E|Sigma|^2
  double mean_resistance = 0.0;  // R = sum_v G_{v,v} / |V|
  double hitting_sum = 0.0;      // sum_{u,v} G_{u,v} / |V|
};

struct ForestStatistics {
  double ratio_k2_k = 0.0;
  double log_kappa = 0.0;
  double log_kappa2 = 0.0;
  double ell_star = 0.0;  // E|dSigma|, conductance weighted
  double mean_size = 0.0;
  double second_moment = 0.0;
  double mean_resistance = 0.0;
  double hitting_sum = 0.0;
};

struct PinnedStatistics {
  Vertex pin = 0;
  double conditional_mean_size = 0.0;
};

/// Closed-form statistics of the floating component Sigma of a random
/// two-component spanning forest, all read off one factorization at b.
///
/// With ratio = kappa2/kappa:
///   P(u in Sigma)          = G_{u,u} / ratio
///   P(u, v in Sigma)       = G_{u,v} / ratio
///   P(v in Sigma | u)      = G_{u,v} / G_{u,u}
///   P(e in dSigma)         = T(e,e) / (c(e) ratio)
///   E|dSigma|              = (|V| - 1) / ratio
///   E|Sigma|, E|Sigma|^2   = sum_u G_{u,u} / ratio, sum_{u,v} G_{u,v} / ratio
///   E(|Sigma| : z0 in Sigma) = sum_v G_{v,z0} / G_{z0,z0}
class ForestAnalyzer {
 public:
  explicit ForestAnalyzer(WeightedGraph g, ForestOptions options = {})
      : options_(options), oracle_(std::move(g), options.solver), sweep_(oracle_.sweep()),
        kernel_(potential_kernel(oracle_.graph(), sweep_)),
        ratio_(ratio_from_kernel(oracle_.graph(), kernel_, options.rule)), row_sums_(oracle_.row_sums()) {}

  const GreenOracle& oracle() const { return oracle_; }
  const WeightedGraph& graph() const { return oracle_.graph(); }
  const GreenSweep& sweep() const { return sweep_; }
  const PotentialKernel& kernel() const { return kernel_; }
  const std::vector<double>& row_sums() const { return row_sums_; }

  double ratio() const { return ratio_; }
  double log_kappa() const { return oracle_.log_kappa(); }
  double log_kappa2() const { return oracle_.log_kappa() + std::log(ratio_); }

  double prob_in_sigma(Vertex u) const {
    require_interior(u);
    return sweep_.diagonal[u] / ratio_;
  }

  double prob_pair(Vertex u, Vertex v) const {
    require_interior(u);
    require_interior(v);
    if (u == v) return prob_in_sigma(u);
    return oracle_.green(u, v) / ratio_;
  }

  /// P(v in Sigma | u in Sigma); harmonic in v away from u and b.
  double prob_conditional(Vertex v, Vertex u) const {
    require_interior(u);
    graph().check_vertex(v);
    if (v == graph().boundary()) return 0.0;
    if (v == u) return 1.0;
    return oracle_.green(u, v) / sweep_.diagonal[u];
  }

  /// Transfer current T(e,e), from the sweep.
  double edge_transfer(EdgeId e) const {
    const Edge& edge = graph().edge(e);
    return edge.c * (kernel_.forward[e] + kernel_.backward[e]);
  }

  double prob_edge_separates(EdgeId e) const { return edge_transfer(e) / (graph().edge(e).c * ratio_); }

  double expected_boundary() const { return static_cast<double>(graph().vertex_count() - 1) / ratio_; }

  SizeMoments size_moments() const {
    const double n = static_cast<double>(graph().vertex_count());
    const double trace = detail::pairwise_sum(sweep_.diagonal);
    const double total = detail::pairwise_sum(row_sums_);
    return {trace / ratio_, total / ratio_, trace / n, total / n};
  }

  double pinned_mean_size(Vertex z0) const {
    require_interior(z0);
    return row_sums_[z0] / sweep_.diagonal[z0];
  }

  PinnedStatistics pinned(Vertex z0) const { return {z0, pinned_mean_size(z0)}; }

  ForestStatistics statistics() const {
    const SizeMoments m = size_moments();
    return {ratio_, log_kappa(), log_kappa2(), expected_boundary(), m.mean, m.second_moment, m.mean_resistance,
            m.hitting_sum};
  }

 private:
  void require_interior(Vertex u) const {
    graph().check_vertex(u);
    if (u == graph().boundary())
      throw Error(ErrorKind::InvalidVertex, "the boundary vertex is never in the floating component");
  }

  ForestOptions options_;
  GreenOracle oracle_;
  GreenSweep sweep_;
  PotentialKernel kernel_;
  double ratio_;
  std::vector<double> row_sums_;
};

inline double prob_in_sigma(const WeightedGraph& g, Vertex u) { return ForestAnalyzer(g).prob_in_sigma(u); }
inline double prob_pair_in_sigma(const WeightedGraph& g, Vertex u, Vertex v) {
  return ForestAnalyzer(g).prob_pair(u, v);
}
inline double prob_conditional(const WeightedGraph& g, Vertex v, Vertex u) {
  return ForestAnalyzer(g).prob_conditional(v, u);
}
inline double prob_edge_separates(const WeightedGraph& g, EdgeId e) {
  return ForestAnalyzer(g).prob_edge_separates(e);
}
inline double expected_boundary(const WeightedGraph& g) { return ForestAnalyzer(g).expected_boundary(); }
inline SizeMoments size_moments(const WeightedGraph& g) { return ForestAnalyzer(g).size_moments(); }
inline double pinned_mean_size(const WeightedGraph& g, Vertex z0) { return ForestAnalyzer(g).pinned_mean_size(z0); }

}  // namespace twoforest
