#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "twoforest/detail/numeric.hpp"
#include "twoforest/graph.hpp"

namespace twoforest {

using Rng = std::mt19937_64;

/// Independent generator for stream `stream` of a run seeded with `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x2f5e1u};
  return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct SpanningTree {
  std::vector<EdgeId> edges;  // sorted
};

struct TwoForest {
  std::vector<EdgeId> edges;           // sorted
  std::vector<Vertex> floating;        // Sigma, sorted
  std::vector<EdgeId> boundary_edges;  // dSigma, sorted
  double boundary_conductance = 0.0;   // |dSigma|
};

/// Wilson's algorithm rooted at the boundary: loop-erased random walks whose
/// steps are chosen proportionally to conductance. Produces a spanning tree
/// with probability proportional to the product of its conductances.
///
/// Also provides the exact 2SF sampler: draw a tree, delete one of its n-1
/// edges uniformly, accept with probability c_min / c(dF). The tree-minus-edge
/// step reaches a forest F through any tree F + e with e in dF, so
/// P(propose F) is proportional to w(F) c(dF); accepting with weight
/// proportional to 1 / c(dF) leaves P(F) proportional to w(F). Since
/// c(dF) >= c_min the acceptance probability never exceeds one.
class WilsonSampler {
 public:
  explicit WilsonSampler(const WeightedGraph& g)
      : g_(g), cumulative_(g.vertex_count()), c_min_(g.min_conductance()) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      double total = 0.0;
      for (const Incidence& inc : g.incident(v)) {
        total += g.edge(inc.edge).c;
        cumulative_[v].push_back(total);
      }
    }
    parent_edge_.resize(g.vertex_count());
    in_tree_.resize(g.vertex_count());
    next_.resize(g.vertex_count());
  }

  const WeightedGraph& graph() const { return g_; }

  /// Sample a tree; afterwards parent_edge(v) is the edge from v toward b.
  void sample_tree_in_place(Rng& rng) {
    const std::size_t n = g_.vertex_count();
    std::fill(in_tree_.begin(), in_tree_.end(), 0);
    in_tree_[g_.boundary()] = 1;
    parent_edge_[g_.boundary()] = kNoEdge;
    for (Vertex start = 0; start < n; ++start) {
      Vertex u = start;
      while (!in_tree_[u]) {
        next_[u] = step(u, rng);
        u = next_[u].neighbor;
      }
      u = start;
      while (!in_tree_[u]) {
        in_tree_[u] = 1;
        parent_edge_[u] = next_[u].edge;
        u = next_[u].neighbor;
      }
    }
  }

  SpanningTree sample_tree(Rng& rng) {
    sample_tree_in_place(rng);
    SpanningTree t;
    for (Vertex v = 0; v < g_.vertex_count(); ++v)
      if (v != g_.boundary()) t.edges.push_back(parent_edge_[v]);
    std::sort(t.edges.begin(), t.edges.end());
    return t;
  }

  /// One tree-minus-edge proposal (no rejection). `cut_vertex` is the vertex
  /// whose parent edge was removed.
  TwoForest propose(Rng& rng, Vertex* cut_vertex = nullptr) {
    const std::size_t n = g_.vertex_count();
    sample_tree_in_place(rng);
    // uniform over the n-1 tree edges = uniform over non-boundary vertices
    std::size_t pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - 1));
    Vertex x = pick >= g_.boundary() ? pick + 1 : pick;
    if (cut_vertex) *cut_vertex = x;

    children_.assign(n, {});
    for (Vertex v = 0; v < n; ++v)
      if (v != g_.boundary()) children_[g_.edge(parent_edge_[v]).other(v)].push_back(v);

    TwoForest f;
    mask_.assign(n, 0);
    stack_.assign(1, x);
    while (!stack_.empty()) {
      const Vertex v = stack_.back();
      stack_.pop_back();
      mask_[v] = 1;
      f.floating.push_back(v);
      for (Vertex w : children_[v]) stack_.push_back(w);
    }
    std::sort(f.floating.begin(), f.floating.end());
    for (Vertex v : f.floating) {
      for (const Incidence& inc : g_.incident(v)) {
        if (!mask_[inc.neighbor]) {
          f.boundary_edges.push_back(inc.edge);
          f.boundary_conductance += g_.edge(inc.edge).c;
        }
      }
    }
    std::sort(f.boundary_edges.begin(), f.boundary_edges.end());
    for (Vertex v = 0; v < n; ++v)
      if (v != g_.boundary() && v != x) f.edges.push_back(parent_edge_[v]);
    std::sort(f.edges.begin(), f.edges.end());
    return f;
  }

  /// Exact weighted 2SF sample by rejection. `attempts` receives the number
  /// of proposals used.
  TwoForest sample_two_forest(Rng& rng, std::size_t* attempts = nullptr) {
    std::size_t tries = 0;
    for (;;) {
      ++tries;
      TwoForest f = propose(rng);
      if (uniform01(rng) * f.boundary_conductance < c_min_) {
        if (attempts) *attempts = tries;
        return f;
      }
    }
  }

  const std::vector<char>& floating_mask() const { return mask_; }
  double min_conductance() const { return c_min_; }

 private:
  static constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

  Incidence step(Vertex u, Rng& rng) const {
    const auto& cum = cumulative_[u];
    const double r = uniform01(rng) * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), r);
    if (it == cum.end()) --it;
    return g_.incident(u)[static_cast<std::size_t>(it - cum.begin())];
  }

  const WeightedGraph& g_;
  std::vector<std::vector<double>> cumulative_;
  double c_min_;
  std::vector<EdgeId> parent_edge_;
  std::vector<char> in_tree_;
  std::vector<Incidence> next_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<char> mask_;
  std::vector<Vertex> stack_;
};

inline SpanningTree sample_spanning_tree(const WeightedGraph& g, Rng& rng) { return WilsonSampler(g).sample_tree(rng); }

inline TwoForest sample_two_forest(const WeightedGraph& g, Rng& rng) {
  if (g.vertex_count() < 2) throw Error(ErrorKind::InvalidVertex, "a 2SF needs at least two vertices");
  return WilsonSampler(g).sample_two_forest(rng);
}

// ---------------------------------------------------------------------------
// Batches and estimators

/// Samples per RNG stream. Stream i always produces samples
/// [i * kSampleBlock, (i + 1) * kSampleBlock), whatever the worker count.
inline constexpr std::size_t kSampleBlock = 256;

struct SamplerOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

/// Run `fn(index, forest, attempts)` for `count` exact 2SF samples. Blocks
/// are distributed over workers; fn must only touch state owned by `index`.
template <class Fn>
void for_each_two_forest(const WeightedGraph& g, std::size_t count, const SamplerOptions& options, Fn&& fn) {
  if (g.vertex_count() < 2) throw Error(ErrorKind::InvalidVertex, "a 2SF needs at least two vertices");
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  const std::size_t workers = options.workers == 0 ? detail::default_workers() : options.workers;
  detail::parallel_for(blocks, workers, [&](std::size_t block) {
    WilsonSampler sampler(g);
    Rng rng = make_stream(options.seed, block);
    const std::size_t end = std::min(count, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      std::size_t attempts = 0;
      const TwoForest f = sampler.sample_two_forest(rng, &attempts);
      fn(i, f, attempts);
    }
  });
}

/// Same, but for raw tree-minus-edge proposals (importance weighting).
template <class Fn>
void for_each_proposal(const WeightedGraph& g, std::size_t count, const SamplerOptions& options, Fn&& fn) {
  if (g.vertex_count() < 2) throw Error(ErrorKind::InvalidVertex, "a 2SF needs at least two vertices");
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  const std::size_t workers = options.workers == 0 ? detail::default_workers() : options.workers;
  detail::parallel_for(blocks, workers, [&](std::size_t block) {
    WilsonSampler sampler(g);
    Rng rng = make_stream(options.seed, block);
    const std::size_t end = std::min(count, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) fn(i, sampler.propose(rng));
  });
}

struct SampleRecord {
  std::size_t sigma_size = 0;
  double boundary_conductance = 0.0;
  std::size_t attempts = 0;
  std::vector<Vertex> floating;  // filled when requested
};

struct SampleBatch {
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::size_t count = 0;
  std::vector<SampleRecord> records;

  std::size_t proposals() const {
    std::size_t total = 0;
    for (const SampleRecord& r : records) total += r.attempts;
    return total;
  }
};

inline SampleBatch sample_batch(const WeightedGraph& g, std::size_t count, const SamplerOptions& options,
                                bool keep_membership = false) {
  SampleBatch batch{options.seed, options.workers, count, std::vector<SampleRecord>(count)};
  for_each_two_forest(g, count, options, [&](std::size_t i, const TwoForest& f, std::size_t attempts) {
    SampleRecord& r = batch.records[i];
    r.sigma_size = f.floating.size();
    r.boundary_conductance = f.boundary_conductance;
    r.attempts = attempts;
    if (keep_membership) r.floating = f.floating;
  });
  return batch;
}

enum class SampleStatistic {
  MeanSize,
  SecondMoment,
  SizeMoment,     // |Sigma|^k, args = {k}
  BoundarySize,   // |dSigma|
  ProbInSigma,    // args = {u}
  ProbPair,       // args = {u, v}
  ThreePoint,     // args = {u, v[, w]}
  EdgeSeparates,  // args = {e}
};

struct SampleRequest {
  SampleStatistic kind = SampleStatistic::MeanSize;
  std::vector<std::size_t> args;
};

inline SampleStatistic parse_sample_statistic(const std::string& name) {
  if (name == "mean_size") return SampleStatistic::MeanSize;
  if (name == "second_moment") return SampleStatistic::SecondMoment;
  if (name == "size_moment") return SampleStatistic::SizeMoment;
  if (name == "boundary_size") return SampleStatistic::BoundarySize;
  if (name == "prob_in_sigma") return SampleStatistic::ProbInSigma;
  if (name == "prob_pair") return SampleStatistic::ProbPair;
  if (name == "three_point") return SampleStatistic::ThreePoint;
  if (name == "edge_separates") return SampleStatistic::EdgeSeparates;
  throw Error(ErrorKind::UnknownStatistic, "unknown sample statistic '" + name + "'");
}

inline void validate(const WeightedGraph& g, const SampleRequest& req) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (req.args.size() < lo || req.args.size() > hi)
      throw Error(ErrorKind::UnknownStatistic, "wrong number of arguments for sample statistic");
  };
  switch (req.kind) {
    case SampleStatistic::MeanSize:
    case SampleStatistic::SecondMoment:
    case SampleStatistic::BoundarySize: need(0, 0); break;
    case SampleStatistic::SizeMoment: need(1, 1); break;
    case SampleStatistic::ProbInSigma: need(1, 1); break;
    case SampleStatistic::ProbPair: need(2, 2); break;
    case SampleStatistic::ThreePoint: need(2, 3); break;
    case SampleStatistic::EdgeSeparates:
      need(1, 1);
      g.edge(req.args[0]);
      return;
  }
  if (req.kind == SampleStatistic::SizeMoment) return;
  for (std::size_t v : req.args) g.check_vertex(v);
}

inline double evaluate(const SampleRequest& req, const TwoForest& f) {
  auto in_sigma = [&](Vertex v) { return std::binary_search(f.floating.begin(), f.floating.end(), v); };
  const double size = static_cast<double>(f.floating.size());
  switch (req.kind) {
    case SampleStatistic::MeanSize: return size;
    case SampleStatistic::SecondMoment: return size * size;
    case SampleStatistic::SizeMoment: return std::pow(size, static_cast<double>(req.args[0]));
    case SampleStatistic::BoundarySize: return f.boundary_conductance;
    case SampleStatistic::ProbInSigma: return in_sigma(req.args[0]) ? 1.0 : 0.0;
    case SampleStatistic::ProbPair:
    case SampleStatistic::ThreePoint:
      return std::all_of(req.args.begin(), req.args.end(), in_sigma) ? 1.0 : 0.0;
    case SampleStatistic::EdgeSeparates:
      return std::binary_search(f.boundary_edges.begin(), f.boundary_edges.end(), req.args[0]) ? 1.0 : 0.0;
  }
  return 0.0;
}

enum class EstimatorMode { Rejection, Importance };

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t proposals = 0;
  double acceptance_rate = 1.0;
};

/// Monte Carlo estimate with standard error. Rejection mode averages exact
/// samples; importance mode reweights raw proposals by 1 / c(dF) and reports
/// a delta-method standard error.
inline Estimate estimate(const WeightedGraph& g, const SampleRequest& req, std::size_t samples,
                         const SamplerOptions& options, EstimatorMode mode = EstimatorMode::Rejection) {
  if (samples == 0) throw Error(ErrorKind::InvalidVertex, "need at least one sample");
  validate(g, req);
  std::vector<double> values(samples);
  Estimate out;
  out.samples = samples;
  if (mode == EstimatorMode::Rejection) {
    std::vector<std::size_t> attempts(samples);
    for_each_two_forest(g, samples, options, [&](std::size_t i, const TwoForest& f, std::size_t a) {
      values[i] = evaluate(req, f);
      attempts[i] = a;
    });
    for (std::size_t a : attempts) out.proposals += a;
    out.acceptance_rate = static_cast<double>(samples) / static_cast<double>(out.proposals);
    const double n = static_cast<double>(samples);
    out.mean = detail::pairwise_sum(values) / n;
    std::vector<double> sq(samples);
    for (std::size_t i = 0; i < samples; ++i) sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
    const double var = samples > 1 ? detail::pairwise_sum(sq) / (n - 1.0) : 0.0;
    out.stderr_ = std::sqrt(var / n);
    return out;
  }

  std::vector<double> weights(samples);
  for_each_proposal(g, samples, options, [&](std::size_t i, const TwoForest& f) {
    values[i] = evaluate(req, f);
    weights[i] = 1.0 / f.boundary_conductance;
  });
  out.proposals = samples;
  std::vector<double> wf(samples);
  for (std::size_t i = 0; i < samples; ++i) wf[i] = weights[i] * values[i];
  const double wsum = detail::pairwise_sum(weights);
  out.mean = detail::pairwise_sum(wf) / wsum;
  std::vector<double> dev(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double d = weights[i] * (values[i] - out.mean);
    dev[i] = d * d;
  }
  out.stderr_ = std::sqrt(detail::pairwise_sum(dev)) / wsum;
  // expected acceptance of the rejection sampler, c_min E[1 / c(dF)]
  out.acceptance_rate = g.min_conductance() * wsum / static_cast<double>(samples);
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness-of-fit of observed counts against category
/// probabilities. Categories with expected count below 5 are pooled.
inline ChiSquareResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> probs) {
  double total = 0.0;
  for (std::size_t o : observed) total += static_cast<double>(o);
  // bins with expected count below 5 are pooled; a pool that is itself still
  // too small is folded into the smallest regular bin
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * total;
    if (expected < 5.0) {
      pooled_obs += static_cast<double>(observed[i]);
      pooled_exp += expected;
    } else {
      cells.emplace_back(static_cast<double>(observed[i]), expected);
    }
  }
  if (pooled_exp > 0.0) {
    if (pooled_exp < 5.0 && !cells.empty()) {
      auto smallest = std::min_element(cells.begin(), cells.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
      smallest->first += pooled_obs;
      smallest->second += pooled_exp;
    } else {
      cells.emplace_back(pooled_obs, pooled_exp);
    }
  }
  double stat = 0.0;
  for (const auto& [o, e] : cells) stat += (o - e) * (o - e) / e;
  const std::size_t bins = cells.size();
  ChiSquareResult r{stat, bins > 1 ? bins - 1 : 0, 1.0};
  if (r.dof > 0) {
    boost::math::chi_squared dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  }
  return r;
}

}  // namespace twoforest
