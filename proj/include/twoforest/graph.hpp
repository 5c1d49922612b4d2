#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twoforest/error.hpp"

namespace twoforest {

using Vertex = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double c = 1.0;

  Vertex other(Vertex w) const { return w == u ? v : u; }
  bool touches(Vertex w) const { return u == w || v == w; }
};

struct Incidence {
  Vertex neighbor;
  EdgeId edge;
};

namespace detail {

// Union-find with union by size and an undo log; no path compression so that
// merges can be rolled back during depth-first enumeration.
class RollbackDisjointSets {
 public:
  explicit RollbackDisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    ++merges_;
    return true;
  }

  void rollback() {
    const std::size_t b = history_.back();
    history_.pop_back();
    const std::size_t a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
    --merges_;
  }

  std::size_t merges() const { return merges_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
  std::size_t merges_ = 0;
};

}  // namespace detail

/// Finite connected multigraph with positive conductances and a marked
/// boundary vertex b. Vertex ids are dense 0..n-1; `labels()` keeps the
/// names the graph was built from. Immutable once constructed.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges, Vertex boundary,
                std::vector<std::string> labels = {})
      : n_(vertex_count), edges_(std::move(edges)), boundary_(boundary), labels_(std::move(labels)) {
    if (n_ == 0) throw Error(ErrorKind::EmptyGraph, "graph has no vertices");
    if (boundary_ >= n_)
      throw Error(ErrorKind::InvalidBoundary, "boundary " + std::to_string(boundary_) + " out of range");
    if (labels_.empty()) {
      labels_.reserve(n_);
      for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != n_) throw Error(ErrorKind::ParseError, "label table size mismatch");

    adjacency_.assign(n_, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const Edge& edge = edges_[e];
      if (edge.u >= n_ || edge.v >= n_)
        throw Error(ErrorKind::InvalidVertex, "edge " + std::to_string(e) + " has an endpoint out of range");
      if (edge.u == edge.v) throw Error(ErrorKind::SelfLoop, "self-loop at vertex " + labels_[edge.u]);
      if (!(edge.c > 0.0) || !std::isfinite(edge.c))
        throw Error(ErrorKind::NonpositiveConductance,
                    "edge " + labels_[edge.u] + "-" + labels_[edge.v] + " has conductance " + std::to_string(edge.c));
      adjacency_[edge.u].push_back({edge.v, e});
      adjacency_[edge.v].push_back({edge.u, e});
    }

    detail::RollbackDisjointSets sets(n_);
    for (const Edge& edge : edges_) sets.unite(edge.u, edge.v);
    if (sets.merges() + 1 != n_) throw Error(ErrorKind::DisconnectedGraph, "graph is not connected");
  }

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  Vertex boundary() const { return boundary_; }

  const Edge& edge(EdgeId e) const {
    if (e >= edges_.size()) throw Error(ErrorKind::UnknownEdge, "edge id " + std::to_string(e));
    return edges_[e];
  }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Incidence> incident(Vertex v) const { return adjacency_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Vertex v) const { return labels_.at(v); }

  /// Weighted degree sum_{w~v} c(vw).
  double conductance_degree(Vertex v) const {
    double total = 0.0;
    for (const Incidence& inc : adjacency_.at(v)) total += edges_[inc.edge].c;
    return total;
  }

  double min_conductance() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Edge& e : edges_) m = std::min(m, e.c);
    return m;
  }

  void check_vertex(Vertex v) const {
    if (v >= n_) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(v) + " out of range");
  }

  /// First edge joining u and v, if any.
  std::optional<EdgeId> find_edge(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    for (const Incidence& inc : adjacency_[u])
      if (inc.neighbor == v) return inc.edge;
    return std::nullopt;
  }

  std::optional<Vertex> find_label(const std::string& label) const {
    for (Vertex v = 0; v < n_; ++v)
      if (labels_[v] == label) return v;
    return std::nullopt;
  }

  /// Same graph, different marked vertex.
  WeightedGraph with_boundary(Vertex root) const {
    if (root >= n_) throw Error(ErrorKind::InvalidBoundary, "boundary " + std::to_string(root) + " out of range");
    WeightedGraph copy = *this;
    copy.boundary_ = root;
    return copy;
  }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  Vertex boundary_;
  std::vector<std::string> labels_;
  std::vector<std::vector<Incidence>> adjacency_;
};

struct LabeledEdge {
  std::string u;
  std::string v;
  double c = 1.0;
};

/// Build from user-labelled edges. Labels are numbered in order of first
/// appearance.
inline WeightedGraph build_graph(std::span<const LabeledEdge> edge_list, const std::string& boundary) {
  if (edge_list.empty()) throw Error(ErrorKind::EmptyGraph, "edge list is empty");
  std::unordered_map<std::string, Vertex> ids;
  std::vector<std::string> labels;
  auto id_of = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (const LabeledEdge& e : edge_list) {
    const Vertex u = id_of(e.u);
    const Vertex v = id_of(e.v);
    if (u == v) throw Error(ErrorKind::SelfLoop, "self-loop at vertex " + e.u);
    edges.push_back({u, v, e.c});
  }
  auto b = ids.find(boundary);
  if (b == ids.end()) throw Error(ErrorKind::InvalidBoundary, "boundary '" + boundary + "' is not a vertex");
  const std::size_t n = labels.size();
  return WeightedGraph(n, std::move(edges), b->second, std::move(labels));
}

/// Build from dense integer ids 0..n-1.
inline WeightedGraph build_graph(std::size_t vertex_count, std::vector<Edge> edges, Vertex boundary) {
  if (edges.empty() && vertex_count != 1) throw Error(ErrorKind::EmptyGraph, "edge list is empty");
  return WeightedGraph(vertex_count, std::move(edges), boundary);
}

/// Result of identifying two vertices.
struct Contraction {
  WeightedGraph graph;
  std::vector<Vertex> vertex_map;               // old vertex -> new vertex
  std::vector<std::optional<EdgeId>> edge_map;  // old edge -> new edge (nullopt if it became a loop)
};

/// Identify u and v. Loops created by the merge are dropped, parallel edges
/// kept. The merged vertex is the boundary if either input was.
inline Contraction contract(const WeightedGraph& g, Vertex u, Vertex v) {
  if (u >= g.vertex_count() || v >= g.vertex_count())
    throw Error(ErrorKind::InvalidVertex, "contract: vertex out of range");
  if (u == v) throw Error(ErrorKind::InvalidVertex, "contract: vertices already identical");
  const Vertex keep = std::min(u, v);
  const Vertex drop = std::max(u, v);

  std::vector<Vertex> vmap(g.vertex_count());
  std::vector<std::string> labels;
  for (Vertex w = 0, next = 0; w < g.vertex_count(); ++w) {
    if (w == drop) continue;
    vmap[w] = next++;
    labels.push_back(w == keep ? g.label(keep) + "~" + g.label(drop) : g.label(w));
  }
  vmap[drop] = vmap[keep];

  std::vector<Edge> edges;
  std::vector<std::optional<EdgeId>> emap(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& old = g.edge(e);
    const Vertex a = vmap[old.u];
    const Vertex b = vmap[old.v];
    if (a == b) continue;
    emap[e] = edges.size();
    edges.push_back({a, b, old.c});
  }
  const Vertex boundary = vmap[g.boundary()];
  return {WeightedGraph(g.vertex_count() - 1, std::move(edges), boundary, std::move(labels)), std::move(vmap),
          std::move(emap)};
}

struct Pinned {
  WeightedGraph graph;
  EdgeId pin_edge;
};

/// Add one unit-conductance edge joining the boundary to u.
inline Pinned pin(const WeightedGraph& g, Vertex u) {
  g.check_vertex(u);
  if (u == g.boundary()) throw Error(ErrorKind::InvalidVertex, "cannot pin the boundary vertex");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  const EdgeId id = edges.size();
  edges.push_back({g.boundary(), u, 1.0});
  return {WeightedGraph(g.vertex_count(), std::move(edges), g.boundary(), g.labels()), id};
}

enum class SubgraphKind { SpanningTree, TwoForest, Other };

struct SubgraphClass {
  SubgraphKind kind = SubgraphKind::Other;
  std::vector<Vertex> floating;        // Sigma, sorted (TwoForest only)
  std::vector<EdgeId> boundary_edges;  // dSigma, sorted (TwoForest only)
};

/// Floating component and its edge boundary for a partition given by a
/// membership mask.
inline std::vector<EdgeId> cut_edges(const WeightedGraph& g, const std::vector<char>& in_sigma) {
  std::vector<EdgeId> cut;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    if (in_sigma[edge.u] != in_sigma[edge.v]) cut.push_back(e);
  }
  return cut;
}

inline SubgraphClass classify_subgraph(const WeightedGraph& g, std::span<const EdgeId> edge_ids) {
  const std::size_t n = g.vertex_count();
  SubgraphClass out;
  detail::RollbackDisjointSets sets(n);
  std::vector<char> seen(g.edge_count(), 0);
  for (EdgeId e : edge_ids) {
    const Edge& edge = g.edge(e);
    if (seen[e]) return out;  // repeated id: not a simple edge set
    seen[e] = 1;
    if (!sets.unite(edge.u, edge.v)) return out;  // cycle
  }
  const std::size_t components = n - sets.merges();
  if (components == 1) {
    out.kind = SubgraphKind::SpanningTree;
    return out;
  }
  if (components != 2) return out;

  out.kind = SubgraphKind::TwoForest;
  const std::size_t root_b = sets.find(g.boundary());
  std::vector<char> mask(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (sets.find(v) != root_b) {
      mask[v] = 1;
      out.floating.push_back(v);
    }
  }
  out.boundary_edges = cut_edges(g, mask);
  return out;
}

}  // namespace twoforest
