#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoforest/exact.hpp"
#include "twoforest/forest_stats.hpp"
#include "twoforest/graph.hpp"

namespace twoforest {

/// Darts: edge e = (u, v) owns dart 2e (u -> v) and dart 2e+1 (v -> u).
using Dart = std::size_t;

constexpr EdgeId dart_edge(Dart d) { return d / 2; }
constexpr Dart reverse_dart(Dart d) { return d ^ 1u; }

/// A connected graph with a rotation system: for every vertex the cyclic
/// order of the darts leaving it. Faces are the orbits of
/// next(d) = successor of reverse(d) around head(d). The outer face is named
/// by one of its darts.
class PlanarEmbedding {
 public:
  PlanarEmbedding(WeightedGraph g, std::vector<std::vector<Dart>> rotation, Dart outer_dart)
      : g_(std::move(g)), rotation_(std::move(rotation)) {
    const std::size_t n = g_.vertex_count();
    const std::size_t darts = 2 * g_.edge_count();
    if (rotation_.size() != n)
      throw Error(ErrorKind::NonPlanarMap, "rotation system must list every vertex");
    position_.assign(darts, kNone);
    for (Vertex v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < rotation_[v].size(); ++i) {
        const Dart d = rotation_[v][i];
        if (d >= darts) throw Error(ErrorKind::NonPlanarMap, "rotation names unknown dart " + std::to_string(d));
        if (tail(d) != v)
          throw Error(ErrorKind::NonPlanarMap, "dart " + std::to_string(d) + " listed at a vertex it does not leave");
        if (position_[d] != kNone) throw Error(ErrorKind::NonPlanarMap, "dart listed twice");
        position_[d] = i;
      }
    }
    for (Dart d = 0; d < darts; ++d)
      if (position_[d] == kNone) throw Error(ErrorKind::NonPlanarMap, "dart " + std::to_string(d) + " missing");

    face_of_.assign(darts, kNone);
    for (Dart start = 0; start < darts; ++start) {
      if (face_of_[start] != kNone) continue;
      std::vector<Dart> walk;
      Dart d = start;
      do {
        face_of_[d] = faces_.size();
        walk.push_back(d);
        d = next(d);
      } while (d != start);
      faces_.push_back(std::move(walk));
    }
    const long long euler = static_cast<long long>(n) - static_cast<long long>(g_.edge_count()) +
                            static_cast<long long>(faces_.size());
    if (euler != 2)
      throw Error(ErrorKind::NonPlanarMap, "Euler check failed: V - E + F = " + std::to_string(euler));
    if (outer_dart >= darts && darts > 0) throw Error(ErrorKind::NonPlanarMap, "outer dart out of range");
    outer_dart_ = outer_dart;
    outer_face_ = darts > 0 ? face_of_[outer_dart] : 0;
  }

  const WeightedGraph& graph() const { return g_; }
  const std::vector<std::vector<Dart>>& rotation() const { return rotation_; }

  Vertex tail(Dart d) const {
    const Edge& e = g_.edge(dart_edge(d));
    return d % 2 == 0 ? e.u : e.v;
  }
  Vertex head(Dart d) const { return tail(reverse_dart(d)); }

  Dart next(Dart d) const {
    const Dart r = reverse_dart(d);
    const auto& around = rotation_[tail(r)];
    return around[(position_[r] + 1) % around.size()];
  }

  std::size_t face_count() const { return faces_.size(); }
  std::size_t face_of(Dart d) const { return face_of_[d]; }
  const std::vector<Dart>& face(std::size_t f) const { return faces_[f]; }
  std::size_t outer_face() const { return outer_face_; }
  Dart outer_dart() const { return outer_dart_; }

  /// Faces on the two sides of edge e (equal for a bridge).
  std::array<std::size_t, 2> sides(EdgeId e) const { return {face_of_[2 * e], face_of_[2 * e + 1]}; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  WeightedGraph g_;
  std::vector<std::vector<Dart>> rotation_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> face_of_;
  std::vector<std::vector<Dart>> faces_;
  Dart outer_dart_ = 0;
  std::size_t outer_face_ = 0;
};

/// Rotation system from straight-line vertex positions (counterclockwise
/// order by angle). With this convention bounded faces are traced clockwise,
/// so the outer face is the one with positive (largest) signed area.
inline PlanarEmbedding embedding_from_positions(const WeightedGraph& g,
                                                const std::vector<std::array<double, 2>>& positions) {
  if (positions.size() != g.vertex_count())
    throw Error(ErrorKind::NonPlanarMap, "need one position per vertex");
  std::vector<std::vector<Dart>> rotation(g.vertex_count());
  std::vector<double> angle(2 * g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    const auto& pu = positions[edge.u];
    const auto& pv = positions[edge.v];
    angle[2 * e] = std::atan2(pv[1] - pu[1], pv[0] - pu[0]);
    angle[2 * e + 1] = std::atan2(pu[1] - pv[1], pu[0] - pv[0]);
    rotation[edge.u].push_back(2 * e);
    rotation[edge.v].push_back(2 * e + 1);
  }
  for (auto& around : rotation)
    std::sort(around.begin(), around.end(), [&](Dart a, Dart b) { return angle[a] < angle[b]; });

  const PlanarEmbedding provisional(g, rotation, 0);
  std::size_t outer = 0;
  double largest = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < provisional.face_count(); ++f) {
    double area = 0.0;
    for (Dart d : provisional.face(f)) {
      const auto& p = positions[provisional.tail(d)];
      const auto& q = positions[provisional.head(d)];
      area += p[0] * q[1] - q[0] * p[1];
    }
    if (area > largest) {
      largest = area;
      outer = f;
    }
  }
  return PlanarEmbedding(g, std::move(rotation), provisional.face(outer).front());
}

struct DualGraph {
  WeightedGraph graph;                       // vertices are faces; boundary is the outer face
  std::vector<std::optional<EdgeId>> of_primal;  // primal edge -> dual edge (none for bridges)
  std::vector<EdgeId> to_primal;             // dual edge -> primal edge
};

/// Planar dual with reciprocal conductances. A primal bridge would become a
/// loop; loops lie in no tree or forest, so they are left out and the edge
/// maps record the omission.
inline DualGraph build_dual(const PlanarEmbedding& map) {
  const WeightedGraph& g = map.graph();
  DualGraph dual{WeightedGraph(1, {}, 0), std::vector<std::optional<EdgeId>>(g.edge_count()), {}};
  std::vector<Edge> edges;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [left, right] = map.sides(e);
    if (left == right) continue;
    dual.of_primal[e] = edges.size();
    dual.to_primal.push_back(e);
    edges.push_back({left, right, 1.0 / g.edge(e).c});
  }
  dual.graph = WeightedGraph(map.face_count(), std::move(edges), map.outer_face());
  return dual;
}

/// The dual as an embedded map. Requires a bridgeless primal, so dual edge ids
/// equal primal edge ids and dual dart d crosses primal dart d. The outer face
/// of the result is the one around the primal boundary vertex.
inline PlanarEmbedding dual_map(const PlanarEmbedding& map) {
  const WeightedGraph& g = map.graph();
  DualGraph dual = build_dual(map);
  if (dual.graph.edge_count() != g.edge_count())
    throw Error(ErrorKind::NonPlanarMap, "dual map of a graph with bridges has loops");
  std::vector<std::vector<Dart>> rotation(map.face_count());
  for (std::size_t f = 0; f < map.face_count(); ++f) rotation[f] = map.face(f);
  PlanarEmbedding provisional(dual.graph, rotation, 0);

  const Vertex b = g.boundary();
  for (std::size_t f = 0; f < provisional.face_count(); ++f) {
    const auto& walk = provisional.face(f);
    const bool around_b = std::all_of(walk.begin(), walk.end(), [&](Dart d) { return g.edge(dart_edge(d)).touches(b); });
    if (around_b) return PlanarEmbedding(dual.graph, std::move(rotation), walk.front());
  }
  return provisional;
}

// ---------------------------------------------------------------------------
// Spanning unicycles

/// Edges of the unique cycle of a unicyclic edge set (leaves peeled off).
inline std::vector<EdgeId> cycle_edges(const WeightedGraph& g, std::span<const EdgeId> edges) {
  std::vector<std::size_t> degree(g.vertex_count(), 0);
  std::vector<char> alive(edges.size(), 1);
  std::vector<std::vector<std::size_t>> at(g.vertex_count());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = g.edge(edges[i]);
    ++degree[e.u];
    ++degree[e.v];
    at[e.u].push_back(i);
    at[e.v].push_back(i);
  }
  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (degree[v] == 1) leaves.push_back(v);
  while (!leaves.empty()) {
    const Vertex v = leaves.back();
    leaves.pop_back();
    for (std::size_t i : at[v]) {
      if (!alive[i]) continue;
      alive[i] = 0;
      const Vertex w = g.edge(edges[i]).other(v);
      --degree[v];
      if (--degree[w] == 1) leaves.push_back(w);
    }
  }
  std::vector<EdgeId> cycle;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (alive[i]) cycle.push_back(edges[i]);
  std::sort(cycle.begin(), cycle.end());
  return cycle;
}

/// Faces separated from the outer face by the given cycle, found by a
/// breadth-first search over faces that never crosses a cycle edge.
inline std::vector<std::size_t> enclosed_faces(const PlanarEmbedding& map, std::span<const EdgeId> cycle) {
  const std::size_t nf = map.face_count();
  std::vector<char> blocked(map.graph().edge_count(), 0);
  for (EdgeId e : cycle) blocked[e] = 1;
  std::vector<std::vector<std::size_t>> adjacent(nf);
  for (EdgeId e = 0; e < map.graph().edge_count(); ++e) {
    if (blocked[e]) continue;
    const auto [a, b] = map.sides(e);
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  }
  std::vector<char> reached(nf, 0);
  std::deque<std::size_t> queue{map.outer_face()};
  reached[map.outer_face()] = 1;
  while (!queue.empty()) {
    const std::size_t f = queue.front();
    queue.pop_front();
    for (std::size_t h : adjacent[f])
      if (!reached[h]) {
        reached[h] = 1;
        queue.push_back(h);
      }
  }
  std::vector<std::size_t> inside;
  for (std::size_t f = 0; f < nf; ++f)
    if (!reached[f]) inside.push_back(f);
  return inside;
}

/// Primal unicycle dual to a 2SF of the dual graph: every primal edge whose
/// dual is not in the forest (bridges always included). Checks that the
/// result has |V| edges and is connected.
inline std::vector<EdgeId> unicycle_from_forest(const PlanarEmbedding& map, const DualGraph& dual,
                                                std::span<const EdgeId> dual_forest) {
  const WeightedGraph& g = map.graph();
  std::vector<char> in_forest(dual.graph.edge_count(), 0);
  for (EdgeId f : dual_forest) {
    if (f >= in_forest.size()) throw Error(ErrorKind::UnknownEdge, "dual edge " + std::to_string(f) + " does not exist");
    in_forest[f] = 1;
  }
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (!dual.of_primal[e] || !in_forest[*dual.of_primal[e]]) out.push_back(e);

  if (out.size() != g.vertex_count())
    throw Error(ErrorKind::BijectionViolation, "complement has " + std::to_string(out.size()) + " edges, expected " +
                                                   std::to_string(g.vertex_count()));
  detail::RollbackDisjointSets sets(g.vertex_count());
  for (EdgeId e : out) sets.unite(g.edge(e).u, g.edge(e).v);
  if (sets.merges() + 1 != g.vertex_count())
    throw Error(ErrorKind::BijectionViolation, "complement of the dual forest is not connected");
  return out;
}

struct UnicycleStatistics {
  double log_kappa = 0.0;   // log kappa(G)
  double log_lambda = 0.0;  // log of the weighted unicycle count
  std::vector<double> cycle_edge_prob;         // via edge separation in the dual
  std::vector<double> cycle_edge_prob_primal;  // via transfer current in the primal
  std::vector<double> face_enclosure;          // per face; outer face is 0
  double mean_area = 0.0;                      // E(A)
  double second_moment_area = 0.0;             // E(A^2)
};

/// Statistics of the weighted random spanning unicycle of a planar map, with
/// A the number of faces enclosed by its cycle. Uses
///   lambda(G) = kappa2(G*) prod_e c(e),
///   P(f enclosed) = (kappa / lambda) G*_{f,f},  P(f, f') = (kappa / lambda) G*_{f,f'},
/// with G* the Green's function of the dual rooted at the outer face.
class UnicycleAnalyzer {
 public:
  explicit UnicycleAnalyzer(const PlanarEmbedding& map, SolverOptions solver = {})
      : map_(map), dual_(build_dual(map)), primal_(map.graph(), {RatioRule::Weighted, solver}),
        dual_stats_(dual_.graph, {RatioRule::Weighted, solver}) {
    std::vector<double> logs;
    for (const Edge& e : map.graph().edges()) logs.push_back(std::log(e.c));
    log_lambda_ = dual_stats_.log_kappa2() + detail::pairwise_sum(logs);
    scale_ = std::exp(primal_.log_kappa() - log_lambda_);
  }

  const DualGraph& dual() const { return dual_; }
  const ForestAnalyzer& dual_analyzer() const { return dual_stats_; }
  const ForestAnalyzer& primal_analyzer() const { return primal_; }

  double face_enclosure(std::size_t f) const {
    if (f >= map_.face_count()) throw Error(ErrorKind::InvalidVertex, "no face " + std::to_string(f));
    return scale_ * dual_stats_.sweep().diagonal[f];
  }

  double face_pair_enclosure(std::size_t f, std::size_t h) const {
    if (f >= map_.face_count() || h >= map_.face_count()) throw Error(ErrorKind::InvalidVertex, "no such face");
    return scale_ * dual_stats_.oracle().green(f, h);
  }

  UnicycleStatistics statistics() const {
    const WeightedGraph& g = map_.graph();
    UnicycleStatistics s;
    s.log_kappa = primal_.log_kappa();
    s.log_lambda = log_lambda_;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      s.cycle_edge_prob.push_back(dual_.of_primal[e] ? dual_stats_.prob_edge_separates(*dual_.of_primal[e]) : 0.0);
      s.cycle_edge_prob_primal.push_back(g.edge(e).c * scale_ * (1.0 - primal_.edge_transfer(e)));
    }
    for (std::size_t f = 0; f < map_.face_count(); ++f) s.face_enclosure.push_back(face_enclosure(f));
    s.mean_area = scale_ * detail::pairwise_sum(dual_stats_.sweep().diagonal);
    s.second_moment_area = scale_ * detail::pairwise_sum(dual_stats_.row_sums());
    return s;
  }

 private:
  const PlanarEmbedding& map_;
  DualGraph dual_;
  ForestAnalyzer primal_;
  ForestAnalyzer dual_stats_;
  double log_lambda_ = 0.0;
  double scale_ = 0.0;
};

inline UnicycleStatistics unicycle_stats(const PlanarEmbedding& map, SolverOptions solver = {}) {
  return UnicycleAnalyzer(map, solver).statistics();
}

// ---------------------------------------------------------------------------
// Brute-force unicycle census (test oracle)

struct CensusUnicycle {
  std::vector<EdgeId> edges;
  std::vector<EdgeId> cycle;
  std::vector<std::size_t> enclosed;
  Rational weight;
};

struct UnicycleCensus {
  std::vector<CensusUnicycle> unicycles;
  Rational lambda{0};
};

/// Every connected spanning subgraph with exactly |V| edges.
inline UnicycleCensus enumerate_unicycles(const PlanarEmbedding& map, std::size_t max_edges = 24) {
  const WeightedGraph& g = map.graph();
  if (g.edge_count() > max_edges)
    throw Error(ErrorKind::TooLarge, "unicycle census needs at most " + std::to_string(max_edges) + " edges");
  UnicycleCensus census;
  std::vector<Rational> c(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) c[e] = to_rational(g.edge(e).c);
  detail::RollbackDisjointSets sets(g.vertex_count());
  std::vector<EdgeId> chosen;
  bool closed = false;
  const std::size_t target = g.vertex_count();

  auto visit = [&](auto&& self, EdgeId next, const Rational& weight) -> void {
    if (chosen.size() == target) {
      CensusUnicycle u{chosen, cycle_edges(g, chosen), {}, weight};
      u.enclosed = enclosed_faces(map, u.cycle);
      census.lambda += weight;
      census.unicycles.push_back(std::move(u));
      return;
    }
    for (EdgeId e = next; e < g.edge_count(); ++e) {
      if (g.edge_count() - e < target - chosen.size()) break;
      const Edge& edge = g.edge(e);
      if (sets.unite(edge.u, edge.v)) {
        chosen.push_back(e);
        self(self, e + 1, weight * c[e]);
        chosen.pop_back();
        sets.rollback();
      } else if (!closed) {
        closed = true;
        chosen.push_back(e);
        self(self, e + 1, weight * c[e]);
        chosen.pop_back();
        closed = false;
      }
    }
  };
  visit(visit, 0, Rational(1));
  return census;
}

}  // namespace twoforest
