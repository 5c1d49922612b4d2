#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "twoforest/detail/numeric.hpp"
#include "twoforest/graph.hpp"

namespace twoforest {

struct SolverOptions {
  /// Vertex count above which the sparse Cholesky is used.
  std::size_t sparse_threshold = 2000;
  /// Relative bound on ||Delta_D X - B|| / (||Delta_D|| ||X|| + ||B||).
  double residual_tolerance = 1e-9;
  /// Threads for column sweeps; 0 picks the hardware concurrency.
  std::size_t workers = 0;
  /// Right-hand sides solved together during sweeps.
  std::size_t block_size = 64;
};

/// Green entries needed by every edge-local formula: the diagonal G_{u,u} and
/// G_{u,v} for each edge uv (edge order), both zero on the boundary.
struct GreenSweep {
  std::vector<double> diagonal;
  std::vector<double> edge_entry;
};

/// A directed use of an edge: `reversed` flips (u, v) to (v, u).
struct DirectedEdge {
  EdgeId id = 0;
  bool reversed = false;
};

/// Factorized Dirichlet Laplacian of a graph at its boundary vertex. Serves
/// log kappa (matrix-tree theorem), Green's function entries G = Delta_D^{-1}
/// and derived quantities. G is the plain matrix inverse; the expected number
/// of visits to v of the walk from u is G_{u,v} times the weighted degree of v.
///
/// Immutable after construction. The column cache is internally locked, so a
/// single oracle can be shared between threads.
class GreenOracle {
  using DenseFactor = Eigen::LLT<Eigen::MatrixXd>;
  using SparseFactor = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

  struct Impl {
    std::size_t dim = 0;
    Eigen::SparseMatrix<double> laplacian;  // Delta_D in reduced indexing
    double laplacian_norm = 0.0;            // infinity norm
    std::variant<std::monostate, DenseFactor, SparseFactor> factor;
    double log_kappa = 0.0;
  };

  struct Cache {
    std::mutex mutex;
    std::unordered_map<Vertex, std::shared_ptr<const std::vector<double>>> columns;
  };

 public:
  explicit GreenOracle(WeightedGraph graph, SolverOptions options = {})
      : graph_(std::move(graph)), options_(options), impl_(std::make_shared<Impl>()),
        cache_(std::make_shared<Cache>()) {
    factorize();
  }

  const WeightedGraph& graph() const { return graph_; }
  const SolverOptions& options() const { return options_; }
  Vertex boundary() const { return graph_.boundary(); }
  double log_kappa() const { return impl_->log_kappa; }
  bool is_sparse() const { return std::holds_alternative<SparseFactor>(impl_->factor); }

  /// Green column G_{u,.} indexed by vertex (entry at b is 0). Cached.
  std::shared_ptr<const std::vector<double>> column(Vertex u) const {
    graph_.check_vertex(u);
    {
      std::lock_guard lock(cache_->mutex);
      auto it = cache_->columns.find(u);
      if (it != cache_->columns.end()) return it->second;
    }
    std::vector<double> rhs(graph_.vertex_count(), 0.0);
    if (u != boundary()) rhs[u] = 1.0;
    auto col = std::make_shared<const std::vector<double>>(solve(rhs));
    std::lock_guard lock(cache_->mutex);
    return cache_->columns.try_emplace(u, std::move(col)).first->second;
  }

  double green(Vertex u, Vertex v) const {
    graph_.check_vertex(v);
    if (u == boundary() || v == boundary()) {
      graph_.check_vertex(u);
      return 0.0;
    }
    return (*column(u))[v];
  }

  /// Solve Delta_D x = rhs. `rhs` is indexed by vertex; its boundary entry is
  /// ignored and the result has x_b = 0.
  std::vector<double> solve(std::span<const double> rhs) const {
    Eigen::MatrixXd block(impl_->dim, 1);
    for (Vertex v = 0; v < graph_.vertex_count(); ++v)
      if (v != boundary()) block(reduced(v), 0) = rhs[v];
    const Eigen::MatrixXd x = solve_block(block);
    std::vector<double> out(graph_.vertex_count(), 0.0);
    for (Vertex v = 0; v < graph_.vertex_count(); ++v)
      if (v != boundary()) out[v] = x(reduced(v), 0);
    return out;
  }

  /// G 1: row sums sum_v G_{u,v}.
  std::vector<double> row_sums() const {
    std::vector<double> ones(graph_.vertex_count(), 1.0);
    return solve(ones);
  }

  /// Diagonal and per-edge Green entries from one pass over all columns.
  /// Columns are solved in blocks and not cached.
  GreenSweep sweep() const {
    const std::size_t n = graph_.vertex_count();
    GreenSweep out{std::vector<double>(n, 0.0), std::vector<double>(graph_.edge_count(), 0.0)};
    const std::size_t dim = impl_->dim;
    if (dim == 0) return out;
    const std::size_t bs = std::max<std::size_t>(1, options_.block_size);
    const std::size_t blocks = (dim + bs - 1) / bs;
    std::vector<Vertex> vertex_of(dim);
    for (Vertex v = 0; v < n; ++v)
      if (v != boundary()) vertex_of[reduced(v)] = v;

    detail::parallel_for(blocks, workers(), [&](std::size_t blk) {
      const std::size_t first = blk * bs;
      const std::size_t count = std::min(bs, dim - first);
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
      for (std::size_t j = 0; j < count; ++j) rhs(first + j, j) = 1.0;
      const Eigen::MatrixXd x = solve_block(rhs);
      for (std::size_t j = 0; j < count; ++j) {
        const Vertex u = vertex_of[first + j];
        out.diagonal[u] = x(first + j, j);
        // each edge is written by exactly one column: its smaller non-boundary endpoint
        for (const Incidence& inc : graph_.incident(u)) {
          const Vertex w = inc.neighbor;
          if (w == boundary()) continue;
          if (w < u) continue;
          out.edge_entry[inc.edge] = x(reduced(w), j);
        }
      }
    });
    return out;
  }

  /// Full |V| x |V| Green matrix (row and column of b are zero).
  Eigen::MatrixXd materialize() const {
    const std::size_t n = graph_.vertex_count();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (impl_->dim == 0) return g;
    const Eigen::MatrixXd inv =
        solve_block(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(impl_->dim), static_cast<Eigen::Index>(impl_->dim)));
    for (Vertex u = 0; u < n; ++u) {
      if (u == boundary()) continue;
      for (Vertex v = 0; v < n; ++v)
        if (v != boundary()) g(u, v) = inv(reduced(u), reduced(v));
    }
    return g;
  }

  std::pair<Vertex, Vertex> endpoints(DirectedEdge e) const {
    const Edge& edge = graph_.edge(e.id);
    return e.reversed ? std::pair{edge.v, edge.u} : std::pair{edge.u, edge.v};
  }

 private:
  std::size_t reduced(Vertex v) const { return v < boundary() ? v : v - 1; }

  std::size_t workers() const { return options_.workers == 0 ? detail::default_workers() : options_.workers; }

  void factorize() {
    const std::size_t n = graph_.vertex_count();
    impl_->dim = n - 1;
    const auto dim = static_cast<Eigen::Index>(impl_->dim);
    if (dim == 0) return;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * graph_.edge_count());
    for (const Edge& e : graph_.edges()) {
      const bool ub = e.u == boundary();
      const bool vb = e.v == boundary();
      if (!ub) triplets.emplace_back(reduced(e.u), reduced(e.u), e.c);
      if (!vb) triplets.emplace_back(reduced(e.v), reduced(e.v), e.c);
      if (!ub && !vb) {
        triplets.emplace_back(reduced(e.u), reduced(e.v), -e.c);
        triplets.emplace_back(reduced(e.v), reduced(e.u), -e.c);
      }
    }
    impl_->laplacian.resize(dim, dim);
    impl_->laplacian.setFromTriplets(triplets.begin(), triplets.end());
    impl_->laplacian.makeCompressed();
    impl_->laplacian_norm = 0.0;
    for (Eigen::Index k = 0; k < impl_->laplacian.outerSize(); ++k) {
      double row = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(impl_->laplacian, k); it; ++it) row += std::abs(it.value());
      impl_->laplacian_norm = std::max(impl_->laplacian_norm, row);  // symmetric: column sums = row sums
    }

    double log_det = 0.0;
    if (n <= options_.sparse_threshold) {
      DenseFactor llt(Eigen::MatrixXd(impl_->laplacian));
      if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::SingularMatrix, "Dirichlet Laplacian is not positive definite");
      const auto diag = llt.matrixLLT().diagonal();
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (!(diag(i) > 0.0)) throw Error(ErrorKind::SingularMatrix, "nonpositive Cholesky pivot");
        log_det += 2.0 * std::log(diag(i));
      }
      impl_->factor = std::move(llt);
    } else {
      auto& llt = impl_->factor.emplace<SparseFactor>();
      llt.compute(impl_->laplacian);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::SingularMatrix, "Dirichlet Laplacian is not positive definite");
      const Eigen::SparseMatrix<double> lower = llt.matrixL();
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double d = lower.coeff(i, i);
        if (!(d > 0.0)) throw Error(ErrorKind::SingularMatrix, "nonpositive Cholesky pivot");
        log_det += 2.0 * std::log(d);
      }
    }
    impl_->log_kappa = log_det;
  }

  Eigen::MatrixXd solve_block(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd x;
    if (const auto* dense = std::get_if<DenseFactor>(&impl_->factor)) {
      x = dense->solve(rhs);
    } else if (const auto* sparse = std::get_if<SparseFactor>(&impl_->factor)) {
      x = sparse->solve(rhs);
    } else {
      return Eigen::MatrixXd(rhs.rows(), rhs.cols());
    }
    const double residual = (impl_->laplacian * x - rhs).cwiseAbs().maxCoeff();
    const double scale = impl_->laplacian_norm * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
    if (!(residual <= options_.residual_tolerance * scale))
      throw Error(ErrorKind::ResidualTooLarge,
                  "Green solve residual " + std::to_string(residual) + " exceeds tolerance (scale " +
                      std::to_string(scale) + ")");
    return x;
  }

  WeightedGraph graph_;
  SolverOptions options_;
  std::shared_ptr<Impl> impl_;
  std::shared_ptr<Cache> cache_;
};

/// T(e, e') = c(e') (G(u1,u2) - G(u1,v2) - G(u2,v1) + G(v1,v2)) for e = u1v1,
/// e' = u2v2: the current through e' when a unit current enters at u1 and
/// leaves at v1. T(e, e) is the probability that e is in a random spanning
/// tree.
inline double transfer_current(const GreenOracle& oracle, DirectedEdge e, DirectedEdge f) {
  const auto [u1, v1] = oracle.endpoints(e);
  const auto [u2, v2] = oracle.endpoints(f);
  const double c = oracle.graph().edge(f.id).c;
  return c * (oracle.green(u1, u2) - oracle.green(u1, v2) - oracle.green(v1, u2) + oracle.green(v1, v2));
}

inline double transfer_current(const GreenOracle& oracle, EdgeId e, EdgeId f) {
  return transfer_current(oracle, DirectedEdge{e}, DirectedEdge{f});
}

/// Look up the first edge u-v; its orientation follows (u, v).
inline DirectedEdge directed_edge(const WeightedGraph& g, Vertex u, Vertex v) {
  const auto id = g.find_edge(u, v);
  if (!id) throw Error(ErrorKind::UnknownEdge, "no edge between " + g.label(u) + " and " + g.label(v));
  return {*id, g.edge(*id).u != u};
}

/// Potential kernel A_{u,v} = G^r_{u,u} - G^r_{u,v}, stored for both
/// orientations of every edge: forward[e] = A_{u,v}, backward[e] = A_{v,u}
/// where (u, v) is the stored orientation of e.
struct PotentialKernel {
  Vertex root = 0;
  std::vector<double> forward;
  std::vector<double> backward;
};

inline PotentialKernel potential_kernel(const WeightedGraph& g, const GreenSweep& sweep) {
  PotentialKernel k{g.boundary(), std::vector<double>(g.edge_count()), std::vector<double>(g.edge_count())};
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    k.forward[e] = sweep.diagonal[edge.u] - sweep.edge_entry[e];
    k.backward[e] = sweep.diagonal[edge.v] - sweep.edge_entry[e];
  }
  return k;
}

inline PotentialKernel potential_kernel(const GreenOracle& oracle) {
  return potential_kernel(oracle.graph(), oracle.sweep());
}

inline PotentialKernel potential_kernel(const WeightedGraph& g, Vertex root, SolverOptions options = {}) {
  return potential_kernel(GreenOracle(g.with_boundary(root), options));
}

}  // namespace twoforest
