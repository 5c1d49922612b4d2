#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twoforest/detail/numeric.hpp"
#include "twoforest/exact.hpp"
#include "twoforest/forest_stats.hpp"
#include "twoforest/planar.hpp"

namespace twoforest {

enum class LatticeFamily { Cubic, Square, Triangular, Hexagonal };

inline std::string to_string(LatticeFamily f) {
  switch (f) {
    case LatticeFamily::Cubic: return "cubic";
    case LatticeFamily::Square: return "square";
    case LatticeFamily::Triangular: return "triangular";
    case LatticeFamily::Hexagonal: return "hexagonal";
  }
  return "unknown";
}

inline LatticeFamily parse_family(const std::string& name) {
  if (name == "cubic") return LatticeFamily::Cubic;
  if (name == "square") return LatticeFamily::Square;
  if (name == "triangular") return LatticeFamily::Triangular;
  if (name == "hexagonal" || name == "hex") return LatticeFamily::Hexagonal;
  throw Error(ErrorKind::UnsupportedFamily, "unknown lattice family '" + name + "'");
}

/// Box of size n: for the cubic and square lattices the sites with
/// |x_i| < n (side 2n - 1); for triangular and hexagonal a rhombic patch of
/// (2n - 1) x (2n - 1) fundamental domains. Everything outside is wired
/// into a single boundary vertex.
struct LatticeSpec {
  LatticeFamily family = LatticeFamily::Square;
  std::size_t dim = 2;
  std::size_t n = 2;
};

struct Lattice {
  WeightedGraph graph;
  std::vector<std::size_t> shape;                 // cells per axis
  std::size_t sublattices = 1;
  std::vector<std::array<double, 2>> positions;   // planar families only; boundary at NaN
  std::optional<PlanarEmbedding> map;

  /// Vertex of the site with cell coordinates `cell` and sublattice `sub`.
  Vertex site(std::span<const std::size_t> cell, std::size_t sub = 0) const {
    std::size_t index = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (cell[i] >= shape[i]) throw Error(ErrorKind::InvalidVertex, "site outside the box");
      index += cell[i] * stride;
      stride *= shape[i];
    }
    return index * sublattices + sub;
  }
};

namespace detail {

struct PeriodicLayout {
  std::array<double, 2> e1, e2;
  std::vector<std::array<double, 2>> offsets;  // per sublattice
  struct EdgeType {
    std::size_t from, to;
    int dx, dy;
  };
  std::vector<EdgeType> edge_types;
};

inline PeriodicLayout layout(LatticeFamily family) {
  const double h = std::sqrt(3.0) / 2.0;
  switch (family) {
    case LatticeFamily::Cubic:
    case LatticeFamily::Square: return {{1, 0}, {0, 1}, {{0, 0}}, {{0, 0, 1, 0}, {0, 0, 0, 1}}};
    case LatticeFamily::Triangular:
      return {{1, 0}, {0.5, h}, {{0, 0}}, {{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, -1, 1}}};
    case LatticeFamily::Hexagonal:
      return {{1, 0}, {0.5, h}, {{0, 0}, {0.5, h / 3.0}}, {{0, 1, 0, 0}, {0, 1, -1, 0}, {0, 1, 0, -1}}};
  }
  throw Error(ErrorKind::UnsupportedFamily, "unknown family");
}

/// Planar patch of m1 x m2 cells. With `wired`, lattice edges leaving the
/// patch are attached to an extra boundary vertex (the last one) and a
/// rotation system is built for it; otherwise only internal edges are kept
/// and vertex 0 is the boundary.
inline Lattice build_patch(LatticeFamily family, std::size_t m1, std::size_t m2, bool wired, double scale = 1.0,
                           std::array<double, 2> origin = {0, 0}) {
  const PeriodicLayout lay = layout(family);
  const std::size_t s = lay.offsets.size();
  const std::size_t sites = m1 * m2 * s;
  const std::size_t n = wired ? sites + 1 : sites;
  const Vertex b = wired ? sites : 0;

  auto inside = [&](long i, long j) { return i >= 0 && j >= 0 && i < long(m1) && j < long(m2); };
  auto index = [&](long i, long j, std::size_t sub) { return (std::size_t(j) * m1 + std::size_t(i)) * s + sub; };
  auto position = [&](long i, long j, std::size_t sub) -> std::array<double, 2> {
    const auto& o = lay.offsets[sub];
    return {origin[0] + scale * (double(i) * lay.e1[0] + double(j) * lay.e2[0] + o[0]),
            origin[1] + scale * (double(i) * lay.e1[1] + double(j) * lay.e2[1] + o[1])};
  };

  std::vector<Edge> edges;
  std::vector<std::array<double, 2>> far_end;  // geometric position of the other end, per dart
  std::vector<std::string> labels(n);
  std::vector<std::array<double, 2>> pos(n, {std::nan(""), std::nan("")});
  for (long j = 0; j < long(m2); ++j)
    for (long i = 0; i < long(m1); ++i)
      for (std::size_t sub = 0; sub < s; ++sub) {
        labels[index(i, j, sub)] =
            "(" + std::to_string(i) + "," + std::to_string(j) + ")" + (s > 1 ? std::string(1, "AB"[sub]) : "");
        pos[index(i, j, sub)] = position(i, j, sub);
      }
  if (wired) labels[b] = "b";

  for (long j = -1; j <= long(m2); ++j)
    for (long i = -1; i <= long(m1); ++i)
      for (const auto& t : lay.edge_types) {
        const long i2 = i + t.dx;
        const long j2 = j + t.dy;
        const bool in1 = inside(i, j);
        const bool in2 = inside(i2, j2);
        if (in1 && in2) {
          edges.push_back({index(i, j, t.from), index(i2, j2, t.to), 1.0});
          far_end.push_back(position(i2, j2, t.to));
          far_end.push_back(position(i, j, t.from));
        } else if (wired && in1 != in2) {
          const Vertex v = in1 ? index(i, j, t.from) : index(i2, j2, t.to);
          const auto phantom = in1 ? position(i2, j2, t.to) : position(i, j, t.from);
          edges.push_back({v, b, 1.0});
          far_end.push_back(phantom);
          far_end.push_back(pos[v]);  // placeholder; b darts are ordered separately
        }
      }

  Lattice out{WeightedGraph(n, edges, b, labels), {m1, m2}, s, pos, std::nullopt};
  const WeightedGraph& g = out.graph;
  if (!wired) {
    out.map = embedding_from_positions(g, pos);
    return out;
  }

  // Interior vertices: darts by angle toward the neighbour (or the exterior
  // lattice site a wired edge replaces). The boundary vertex: its darts in
  // angular order, around the patch centre, of a point halfway out along
  // the replaced lattice edge.
  std::vector<std::vector<Dart>> rotation(n);
  std::vector<double> key(2 * g.edge_count());
  double cx = 0, cy = 0;
  for (std::size_t v = 0; v < sites; ++v) {
    cx += pos[v][0];
    cy += pos[v][1];
  }
  cx /= double(sites);
  cy /= double(sites);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    for (Dart d : {2 * e, 2 * e + 1}) {
      const Vertex tail = d % 2 == 0 ? edge.u : edge.v;
      rotation[tail].push_back(d);
      if (tail == b) {
        const Vertex v = edge.other(b);
        const auto& p = far_end[2 * e];
        key[d] = std::atan2(0.5 * (pos[v][1] + p[1]) - cy, 0.5 * (pos[v][0] + p[0]) - cx);
      } else {
        const auto& p = far_end[d];
        key[d] = std::atan2(p[1] - pos[tail][1], p[0] - pos[tail][0]);
      }
    }
  }
  for (auto& around : rotation)
    std::sort(around.begin(), around.end(), [&](Dart a, Dart c) { return key[a] < key[c]; });
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      out.map.emplace(g, rotation, rotation[b].front());
      return out;
    } catch (const Error&) {
      std::reverse(rotation[b].begin(), rotation[b].end());
    }
  }
  throw Error(ErrorKind::NonPlanarMap, "could not embed the wired patch");
}

/// Wired box with the given number of sites per axis (any dimension).
inline Lattice build_box(const std::vector<std::size_t>& sides) {
  std::size_t sites = 1;
  for (std::size_t m : sides) {
    if (m == 0) throw Error(ErrorKind::EmptyGraph, "box side must be positive");
    sites *= m;
  }
  const Vertex b = sites;
  std::vector<Edge> edges;
  std::vector<std::size_t> x(sides.size(), 0);
  for (Vertex v = 0; v < sites; ++v) {
    std::size_t stride = 1;
    for (std::size_t i = 0; i < sides.size(); ++i) {
      if (x[i] == 0) edges.push_back({v, b, 1.0});
      edges.push_back({v, x[i] + 1 < sides[i] ? v + stride : b, 1.0});
      stride *= sides[i];
    }
    for (std::size_t i = 0; i < sides.size() && ++x[i] == sides[i]; ++i) x[i] = 0;
  }
  return Lattice{WeightedGraph(sites + 1, std::move(edges), b), sides, 1, {}, std::nullopt};
}

}  // namespace detail

inline Lattice build_lattice(const LatticeSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::EmptyGraph, "lattice size must be at least 1");
  const std::size_t m = 2 * spec.n - 1;
  switch (spec.family) {
    case LatticeFamily::Cubic:
      if (spec.dim == 0) throw Error(ErrorKind::UnsupportedFamily, "cubic lattice needs dimension >= 1");
      if (spec.dim == 2) return detail::build_patch(LatticeFamily::Square, m, m, true, 1.0, {-double(spec.n - 1), -double(spec.n - 1)});
      return detail::build_box(std::vector<std::size_t>(spec.dim, m));
    case LatticeFamily::Square:
      return detail::build_patch(LatticeFamily::Square, m, m, true, 1.0, {-double(spec.n - 1), -double(spec.n - 1)});
    case LatticeFamily::Triangular:
    case LatticeFamily::Hexagonal: return detail::build_patch(spec.family, m, m, true);
  }
  throw Error(ErrorKind::UnsupportedFamily, "unknown family");
}

/// Plain n x n grid graph (no wiring), with its straight-line embedding.
inline Lattice build_grid(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::EmptyGraph, "grid needs at least 2 x 2 vertices");
  return detail::build_patch(LatticeFamily::Square, n, n, false);
}

/// Planar map of a k x k block of unit cells ((k+1)^2 vertices).
inline Lattice build_grid_map(std::size_t cells) { return build_grid(cells + 1); }

/// The domain D = [0, a_1] x ... x [0, a_d] on the mesh (1/n) Z^d: interior
/// points only, exterior wired. Side lengths must be multiples of 1/n.
inline Lattice build_domain_box(const std::vector<double>& sides, std::size_t n) {
  std::vector<std::size_t> m;
  for (double a : sides) {
    const double steps = std::round(a * double(n));
    if (!(a > 0.0) || steps < 2.0) throw Error(ErrorKind::EmptyGraph, "domain side too small for this mesh");
    m.push_back(static_cast<std::size_t>(steps) - 1);
  }
  if (m.size() == 2)
    return detail::build_patch(LatticeFamily::Square, m[0], m[1], true, 1.0 / double(n), {1.0 / double(n), 1.0 / double(n)});
  return detail::build_box(m);
}

// ---------------------------------------------------------------------------
// Boundary size and the grid ratio

/// E|dSigma| on a finite graph.
inline double ell_star_finite(const WeightedGraph& g, SolverOptions solver = {}) {
  return ForestAnalyzer(g, {RatioRule::Weighted, solver}).expected_boundary();
}

/// Limit of E|dSigma| for a periodic lattice:
/// n0 / sum over one fundamental domain of [A_{u,v} A_{v,u} + (A_{u,v} - A_{v,u})^2],
/// with A_{u,v} = A_{v,u} = 1/deg on these edge-transitive lattices.
inline Rational ell_star_periodic(LatticeFamily family, std::size_t dim = 2) {
  std::size_t n0 = 1, edges = 0, degree = 0;
  switch (family) {
    case LatticeFamily::Cubic:
      if (dim == 0) throw Error(ErrorKind::UnsupportedFamily, "cubic lattice needs dimension >= 1");
      edges = dim;
      degree = 2 * dim;
      break;
    case LatticeFamily::Square: edges = 2, degree = 4; break;
    case LatticeFamily::Triangular: edges = 3, degree = 6; break;
    case LatticeFamily::Hexagonal: n0 = 2, edges = 3, degree = 3; break;
  }
  const Rational a(1, static_cast<long long>(degree));
  Rational sum(0);
  for (std::size_t e = 0; e < edges; ++e) sum += a * a + (a - a) * (a - a);
  return Rational(static_cast<long long>(n0)) / sum;
}

/// (kappa2/kappa) / n^2 on the n x n grid.
inline double grid_ratio_check(std::size_t n, SolverOptions solver = {}) {
  const Lattice grid = build_grid(n);
  return ratio_k2_over_k(grid.graph, std::nullopt, RatioRule::Weighted, solver) / double(n * n);
}

// ---------------------------------------------------------------------------
// Mean resistance

/// n^{-d} sum over k in {1..n}^d, all-n term omitted, of
/// (4 sum_i sin^2(pi k_i / n))^{-1}: the normalized trace of the
/// pseudo-inverse of the Laplacian of the discrete d-torus of side n.
inline double R_n_eigensum(std::size_t d, std::size_t n) {
  if (d == 0 || n < 2) throw Error(ErrorKind::InvalidVertex, "R_n needs d >= 1 and n >= 2");
  std::vector<double> s(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = std::sin(std::numbers::pi * double(k) / double(n));
    s[k - 1] = 4.0 * x * x;
  }
  s[n - 1] = 0.0;  // sin(pi) evaluates to ~1e-16, not 0
  // one partial sum per leading index, then a fixed pairwise reduction
  std::vector<double> partial(n, 0.0);
  detail::parallel_for(n, detail::default_workers(), [&](std::size_t k1) {
    detail::KahanSum acc;
    std::vector<std::size_t> k(d, 0);
    k[0] = k1;
    for (;;) {
      double lambda = 0.0;
      bool all_last = true;
      for (std::size_t i = 0; i < d; ++i) {
        lambda += s[k[i]];
        all_last = all_last && k[i] == n - 1;
      }
      if (!all_last) acc.add(1.0 / lambda);
      std::size_t i = 1;
      for (; i < d && ++k[i] == n; ++i) k[i] = 0;
      if (i == d) break;
    }
    partial[k1] = acc.value();
  });
  return detail::pairwise_sum(partial) / std::pow(double(n), double(d));
}

/// Mean Dirichlet Green's trace sum_v G_{v,v} / |V| of a wired cubic box
/// with `side` sites per axis (|V| counts the boundary vertex), from the
/// separable sine spectrum of the Dirichlet Laplacian.
inline double wired_box_mean_trace(std::size_t d, std::size_t side) {
  if (d == 0 || side == 0) throw Error(ErrorKind::InvalidVertex, "need d >= 1 and a positive side");
  std::vector<double> s(side);
  for (std::size_t k = 1; k <= side; ++k) {
    const double x = std::sin(std::numbers::pi * double(k) / (2.0 * double(side + 1)));
    s[k - 1] = 4.0 * x * x;
  }
  std::vector<double> partial(side, 0.0);
  detail::parallel_for(side, detail::default_workers(), [&](std::size_t k1) {
    detail::KahanSum acc;
    std::vector<std::size_t> k(d, 0);
    k[0] = k1;
    for (;;) {
      double lambda = 0.0;
      for (std::size_t i = 0; i < d; ++i) lambda += s[k[i]];
      acc.add(1.0 / lambda);
      std::size_t i = 1;
      for (; i < d && ++k[i] == side; ++i) k[i] = 0;
      if (i == d) break;
    }
    partial[k1] = acc.value();
  });
  return detail::pairwise_sum(partial) / (std::pow(double(side), double(d)) + 1.0);
}

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n.
inline GaussLegendre gauss_legendre(std::size_t n) {
  GaussLegendre rule{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

// pi^{-(d-1)} (d-1) int_0^pi u^{d-2} int_{[0,1]^{d-2}} F(u, u v) dv du, where
// F = 1/sqrt(a^2 - 4) with a - 2 = sum 4 sin^2(theta_i / 2).
inline double r_star_rule(std::size_t d, std::size_t points) {
  const GaussLegendre rule = gauss_legendre(points);
  const std::size_t inner = d - 2;
  std::vector<double> partial(points, 0.0);
  parallel_for(points, default_workers(), [&](std::size_t iu) {
    const double u = 0.5 * std::numbers::pi * (rule.nodes[iu] + 1.0);
    const double wu = 0.5 * std::numbers::pi * rule.weights[iu];
    const double su = std::sin(0.5 * u);
    KahanSum acc;
    std::vector<std::size_t> idx(inner, 0);
    for (;;) {
      double a_minus_2 = 4.0 * su * su;
      double w = 1.0;
      for (std::size_t k = 0; k < inner; ++k) {
        const double v = 0.5 * (rule.nodes[idx[k]] + 1.0);
        const double sv = std::sin(0.5 * u * v);
        a_minus_2 += 4.0 * sv * sv;
        w *= 0.5 * rule.weights[idx[k]];
      }
      acc.add(w * std::pow(u, double(d - 2)) / std::sqrt(a_minus_2 * (a_minus_2 + 4.0)));
      std::size_t k = 0;
      for (; k < inner && ++idx[k] == points; ++k) idx[k] = 0;
      if (k == inner) break;
    }
    partial[iu] = wu * acc.value();
  });
  return double(d - 1) * pairwise_sum(partial) / std::pow(std::numbers::pi, double(d - 1));
}

}  // namespace detail

/// R* = (2 pi)^{-d} int_{[0, 2 pi]^d} d theta / (2d - 2 sum cos theta_i).
/// One angle is integrated in closed form (giving 1/sqrt(a^2 - 4)), the
/// integrable singularity at the origin is removed by a Duffy transform, and
/// the remainder uses product Gauss-Legendre. The error estimate is the
/// change from `points` to 2 * `points` nodes per axis.
inline QuadratureResult R_star(std::size_t d, std::size_t points = 0) {
  if (d <= 2) throw Error(ErrorKind::DivergentIntegral, "R* diverges for d <= 2 (recurrent walk)");
  if (points == 0) points = d <= 4 ? 48 : 16;
  const double coarse = detail::r_star_rule(d, points);
  const double fine = detail::r_star_rule(d, 2 * points);
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Exit-time constant of a cuboid

struct SeriesResult {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// C(D) = 4^{2d} / pi^{2d+2} sum_{odd n_i <= N} prod_i (a_i n_i^2)^{-1} (sum_i n_i^2 / a_i^2)^{-1}.
/// Tail bound: dropping sum_j n_j^2/a_j^2 to one term bounds every omitted
/// term, and sum_{odd n > N} n^{-4} <= 1/(6 N^3).
inline SeriesResult C_of_D(const std::vector<double>& sides, std::size_t truncation) {
  const std::size_t d = sides.size();
  if (d == 0) throw Error(ErrorKind::InvalidVertex, "need at least one side");
  for (double a : sides)
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::NonpositiveConductance, "side lengths must be positive");
  if (truncation < 1) throw Error(ErrorKind::InvalidVertex, "truncation must be at least 1");
  const std::size_t last_odd = truncation % 2 == 1 ? truncation : truncation - 1;
  const std::size_t count = (last_odd + 1) / 2;
  const double prefactor = std::pow(16.0, double(d)) / std::pow(std::numbers::pi, 2.0 * double(d) + 2.0);

  std::vector<double> partial(count, 0.0);
  detail::parallel_for(count, detail::default_workers(), [&](std::size_t first) {
    detail::KahanSum acc;
    std::vector<std::size_t> idx(d, 0);
    idx[0] = first;
    for (;;) {
      double product = 1.0;
      double q = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double n = double(2 * idx[i] + 1);
        product *= sides[i] * n * n;
        q += n * n / (sides[i] * sides[i]);
      }
      acc.add(1.0 / (product * q));
      std::size_t i = 1;
      for (; i < d && ++idx[i] == count; ++i) idx[i] = 0;
      if (i == d) break;
    }
    partial[first] = acc.value();
  });

  const double n3 = std::pow(double(last_odd), 3.0);
  double tail = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double term = sides[j] / (6.0 * n3);
    for (std::size_t i = 0; i < d; ++i)
      if (i != j) term *= std::numbers::pi * std::numbers::pi / (8.0 * sides[i]);
    tail += term;
  }
  return {prefactor * detail::pairwise_sum(partial), prefactor * tail};
}

// ---------------------------------------------------------------------------
// Green's function scaling on the unit square

/// Dirichlet Green's function of -Laplacian on the unit square. The double
/// sine series is summed in closed form along the axis with the larger
/// separation, leaving
///   sum_k 2 sin(k pi s) sin(k pi s') sinh(k pi t<) sinh(k pi (1 - t>)) / (k pi sinh(k pi)),
/// whose terms decay like exp(-k pi |t - t'|); summation stops once the
/// geometric tail bound drops below `tolerance`.
inline double green_unit_square(std::array<double, 2> z, std::array<double, 2> w, double tolerance = 1e-8) {
  for (double c : {z[0], z[1], w[0], w[1]})
    if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::PointOnBoundary, "point not inside the unit square");
  const bool along_x = std::abs(z[0] - w[0]) >= std::abs(z[1] - w[1]);
  const double t1 = along_x ? z[0] : z[1], t2 = along_x ? w[0] : w[1];
  const double s1 = along_x ? z[1] : z[0], s2 = along_x ? w[1] : w[0];
  const double lo = std::min(t1, t2), hi = std::max(t1, t2);
  const double gap = hi - lo;
  if (gap == 0.0) return std::numeric_limits<double>::infinity();
  const double pi = std::numbers::pi;
  detail::KahanSum sum;
  for (std::size_t k = 1;; ++k) {
    const double kp = double(k) * pi;
    // sinh(a) sinh(b) / sinh(c) with a + b = c - kp * gap, in overflow-free form
    const double ratio = std::exp(-kp * gap) * (-std::expm1(-2.0 * kp * lo)) * (-std::expm1(-2.0 * kp * (1.0 - hi))) /
                         (2.0 * (-std::expm1(-2.0 * kp)));
    sum.add(2.0 * std::sin(kp * s1) * std::sin(kp * s2) * ratio / kp);
    const double q = std::exp(-pi * gap);
    const double tail = std::exp(-double(k + 1) * pi * gap) / (double(k + 1) * pi * (1.0 - q)) / (1.0 - std::exp(-2.0 * pi));
    if (tail < tolerance) break;
  }
  return sum.value();
}

struct ScalingCheck {
  double lhs = 0.0;  // exact P(z_n, z'_n in Sigma)
  double rhs = 0.0;  // 4d g(z, z') / (|D| n^{2d-2}) with d = 2, |D| = 1
};

/// Exact pair-inclusion probability on the unit square with mesh 1/n,
/// against its Brownian prediction. z_n is the lattice point nearest z.
inline ScalingCheck green_scaling_check(std::size_t n, std::array<double, 2> z, std::array<double, 2> w,
                                        SolverOptions solver = {}) {
  auto snap = [&](std::array<double, 2> p) {
    std::array<std::size_t, 2> cell{};
    for (int i = 0; i < 2; ++i) {
      if (!(p[i] > 0.0 && p[i] < 1.0)) throw Error(ErrorKind::PointOnBoundary, "point not inside the unit square");
      const double k = std::round(p[i] * double(n));
      if (k < 1.0 || k > double(n) - 1.0) throw Error(ErrorKind::PointOnBoundary, "point rounds onto the boundary");
      cell[i] = static_cast<std::size_t>(k) - 1;
    }
    return cell;
  };
  const auto cz = snap(z);
  const auto cw = snap(w);
  const Lattice box = build_domain_box({1.0, 1.0}, n);
  const ForestAnalyzer a(box.graph, {RatioRule::Weighted, solver});
  const Vertex vz = box.site(cz);
  const Vertex vw = box.site(cw);
  const double lhs = a.prob_pair(vz, vw);
  const double rhs = 8.0 * green_unit_square(z, w) / (double(n) * double(n));
  return {lhs, rhs};
}

}  // namespace twoforest
