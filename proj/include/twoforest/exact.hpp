#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "twoforest/forest_stats.hpp"
#include "twoforest/graph.hpp"

namespace twoforest {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using ExactMatrix = std::vector<std::vector<Rational>>;

/// Exact value of a finite double (every finite double is a dyadic rational).
inline Rational to_rational(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::ParseError, "non-finite value has no rational form");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent, |mantissa| in [0.5, 1)
  const auto digits = std::numeric_limits<double>::digits;
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, digits));
  exponent -= digits;
  BigInt num(scaled);
  BigInt den(1);
  if (exponent >= 0)
    num <<= exponent;
  else
    den <<= -exponent;
  return Rational(num, den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Fraction-free (Bareiss) determinant. Every intermediate division is exact,
/// so for integer input all intermediates stay integral.
inline Rational bareiss_determinant(ExactMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return Rational(1);
  Rational sign(1);
  Rational previous(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return Rational(0);
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
      m[i][k] = 0;
    }
    previous = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// Gauss-Jordan inverse over the rationals.
inline ExactMatrix exact_inverse(ExactMatrix a) {
  const std::size_t n = a.size();
  ExactMatrix inv(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw Error(ErrorKind::SingularMatrix, "exact inverse of a singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

namespace detail {
inline std::size_t reduced_index(Vertex v, Vertex b) { return v < b ? v : v - 1; }
}  // namespace detail

inline ExactMatrix exact_dirichlet_laplacian(const WeightedGraph& g) {
  const Vertex b = g.boundary();
  const std::size_t dim = g.vertex_count() - 1;
  ExactMatrix m(dim, std::vector<Rational>(dim, Rational(0)));
  for (const Edge& e : g.edges()) {
    const Rational c = to_rational(e.c);
    const bool ub = e.u == b;
    const bool vb = e.v == b;
    const std::size_t iu = ub ? 0 : detail::reduced_index(e.u, b);
    const std::size_t iv = vb ? 0 : detail::reduced_index(e.v, b);
    if (!ub) m[iu][iu] += c;
    if (!vb) m[iv][iv] += c;
    if (!ub && !vb) {
      m[iu][iv] -= c;
      m[iv][iu] -= c;
    }
  }
  return m;
}

/// Weighted spanning-tree count det(Delta_D), exactly.
inline Rational exact_kappa(const WeightedGraph& g) { return bareiss_determinant(exact_dirichlet_laplacian(g)); }

/// Exact Green's function as a |V| x |V| matrix with zero boundary row/column.
inline ExactMatrix exact_green(const WeightedGraph& g) {
  const Vertex b = g.boundary();
  const std::size_t n = g.vertex_count();
  ExactMatrix out(n, std::vector<Rational>(n, Rational(0)));
  if (n == 1) return out;
  const ExactMatrix inv = exact_inverse(exact_dirichlet_laplacian(g));
  for (Vertex u = 0; u < n; ++u) {
    if (u == b) continue;
    for (Vertex v = 0; v < n; ++v)
      if (v != b) out[u][v] = inv[detail::reduced_index(u, b)][detail::reduced_index(v, b)];
  }
  return out;
}

/// kappa2/kappa from the potential-kernel sum, in exact arithmetic.
inline Rational exact_ratio(const WeightedGraph& g, RatioRule rule = RatioRule::Weighted) {
  const ExactMatrix green = exact_green(g);
  Rational total(0);
  for (const Edge& e : g.edges()) {
    const Rational a = green[e.u][e.u] - green[e.u][e.v];
    const Rational b = green[e.v][e.v] - green[e.v][e.u];
    const Rational w = rule == RatioRule::Weighted ? to_rational(e.c) : Rational(1);
    total += w * (a * b + (a - b) * (a - b));
  }
  return total;
}

}  // namespace twoforest
