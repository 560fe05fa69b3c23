#pragma once

// Expected spread three ways: Monte-Carlo simulation, exact enumeration of
// live-edge worlds (small instances only), and the per-vertex spread decrease
// estimated from dominator trees of sampled graphs.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imin/dominator.hpp"
#include "imin/graph.hpp"
#include "imin/live_edge.hpp"
#include "imin/parallel.hpp"

namespace imin {

enum class SpreadMethod { MonteCarlo, Exact, Sampled };

inline const char* to_string(SpreadMethod m) {
  switch (m) {
    case SpreadMethod::MonteCarlo: return "mcs";
    case SpreadMethod::Exact: return "exact";
    case SpreadMethod::Sampled: return "sampled";
  }
  return "?";
}

struct SpreadEstimate {
  double value = 0.0;
  SpreadMethod method = SpreadMethod::MonteCarlo;
  std::uint64_t samples = 0;  // rounds or sampled graphs; 0 for exact
  double std_error = 0.0;
};

/// Estimated spread decrease from blocking each vertex. Vertices never reached
/// have delta 0; the root's entry is 0 and meaningless.
struct DeltaVector {
  VertexId root = kNoVertex;
  std::uint64_t samples = 0;
  std::vector<double> delta;
  std::vector<double> std_error;
  double mean_reach = 0.0;
};

/// Worlds with more uncertain edges than this are rejected by the exact oracle.
inline constexpr std::size_t kDefaultOracleBudget = 25;

namespace detail {

inline double standard_error(double sum, double sum_sq, std::uint64_t count) {
  if (count < 2) return 0.0;
  const double c = static_cast<double>(count);
  const double mean = sum / c;
  const double var = std::max(0.0, (sum_sq - c * mean * mean) / (c - 1.0));
  return std::sqrt(var / c);
}

/// Edges with 0 < p < 1 that can ever be crossed from `sources` while
/// avoiding blocked vertices, in ascending edge order.
inline std::vector<std::size_t> uncertain_edges(const ProbGraph& g, std::span<const VertexId> sources,
                                                const VertexSet& blocked) {
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<VertexId> queue;
  for (VertexId s : sources) {
    if (!seen[s]) queue.push_back(s);
    seen[s] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    for (std::size_t e = g.edge_begin(u); e < g.edge_end(u); ++e) {
      const VertexId v = g.target(e);
      const double p = g.prob(e);
      if (blocked.contains(v) || !(p > 0.0)) continue;
      if (p < 1.0) out.push_back(e);
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Calls visit(weight, keep) once per live-edge world over the uncertain
/// edges, where keep(e) tells whether edge e exists in that world.
template <class Visit>
void enumerate_worlds(const ProbGraph& g, std::span<const VertexId> sources, const VertexSet& blocked,
                      std::size_t budget, Visit&& visit) {
  const auto uncertain = uncertain_edges(g, sources, blocked);
  const std::size_t k = uncertain.size();
  if (k > budget || k >= 63)
    throw GuardError("oracle infeasible: " + std::to_string(k) + " uncertain edges exceed budget " +
                     std::to_string(budget));
  std::vector<std::int32_t> bit_of(g.num_edges(), -1);
  for (std::size_t i = 0; i < k; ++i) bit_of[uncertain[i]] = static_cast<std::int32_t>(i);

  for (std::uint64_t world = 0; world < (std::uint64_t{1} << k); ++world) {
    double weight = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double p = g.prob(uncertain[i]);
      weight *= ((world >> i) & 1) ? p : 1.0 - p;
    }
    auto keep = [&](std::size_t e) {
      const double p = g.prob(e);
      if (p >= 1.0) return true;
      const auto bit = bit_of[e];
      return bit >= 0 && ((world >> bit) & 1) != 0;
    };
    visit(weight, keep);
  }
}

}  // namespace detail

/// Monte-Carlo estimate of the spread of `s` in G[V \ blockers]: the mean
/// reach over `rounds` live-edge samples, with its standard error.
inline SpreadEstimate mcs_spread(const ProbGraph& g, VertexId s, const VertexSet& blockers,
                                 std::uint64_t rounds, std::uint64_t master_seed,
                                 std::size_t threads = 1) {
  if (rounds == 0) throw std::invalid_argument("mcs_spread: rounds must be positive");
  if (blockers.contains(s)) throw std::invalid_argument("mcs_spread: the seed cannot be blocked");
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), rounds);
  std::vector<std::uint64_t> sums(workers, 0), sums_sq(workers, 0);
  parallel_blocks(workers, rounds, [&](std::size_t w, std::size_t begin, std::size_t end) {
    LiveEdgeSampler sampler(g.num_vertices());
    std::uint64_t sum = 0, sum_sq = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t r = sampler.reach(g, s, blockers, SampleCoin(g, master_seed, i));
      sum += r;
      sum_sq += r * r;
    }
    sums[w] = sum;
    sums_sq[w] = sum_sq;
  });
  std::uint64_t sum = 0, sum_sq = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    sum += sums[w];
    sum_sq += sums_sq[w];
  }
  return {static_cast<double>(sum) / static_cast<double>(rounds), SpreadMethod::MonteCarlo, rounds,
          detail::standard_error(static_cast<double>(sum), static_cast<double>(sum_sq), rounds)};
}

struct ExactSpread {
  SpreadEstimate estimate;
  /// Activation probability of every vertex.
  std::vector<double> marginals;
};

/// Exact expected spread of the seed set in G[V \ blockers] by summing reach
/// over all worlds of the uncertain edges. Seeds count themselves.
inline ExactSpread exact_spread(const ProbGraph& g, std::span<const VertexId> seeds,
                                const VertexSet& blockers, std::size_t budget = kDefaultOracleBudget) {
  for (VertexId s : seeds)
    if (blockers.contains(s)) throw std::invalid_argument("exact_spread: a seed cannot be blocked");
  ExactSpread out;
  out.marginals.assign(g.num_vertices(), 0.0);
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<VertexId> queue;
  detail::enumerate_worlds(g, seeds, blockers, budget, [&](double weight, auto&& keep) {
    queue.clear();
    for (VertexId s : seeds) {
      if (!seen[s]) queue.push_back(s);
      seen[s] = 1;
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      for (std::size_t e = g.edge_begin(u); e < g.edge_end(u); ++e) {
        const VertexId v = g.target(e);
        if (seen[v] || blockers.contains(v) || !keep(e)) continue;
        seen[v] = 1;
        queue.push_back(v);
      }
    }
    for (VertexId v : queue) {
      out.marginals[v] += weight;
      seen[v] = 0;
    }
  });
  // Summing marginals in vertex order keeps the result independent of world order.
  double total = 0.0;
  for (double p : out.marginals) total += p;
  out.estimate = {total, SpreadMethod::Exact, 0, 0.0};
  return out;
}

inline ExactSpread exact_spread(const ProbGraph& g, VertexId s, const VertexSet& blockers = {},
                                std::size_t budget = kDefaultOracleBudget) {
  const VertexId seeds[] = {s};
  return exact_spread(g, std::span<const VertexId>(seeds), blockers, budget);
}

/// Whether exact_spread from `s` fits in `budget` with the given blockers.
inline bool oracle_feasible(const ProbGraph& g, VertexId s, const VertexSet& blockers = {},
                            std::size_t budget = kDefaultOracleBudget) {
  const VertexId seeds[] = {s};
  return detail::uncertain_edges(g, seeds, blockers).size() <= std::min<std::size_t>(budget, 62);
}

/// Spread decrease of blocking each vertex, averaged over `theta` sampled
/// graphs of G[V \ blockers]: in every sample, each vertex u collects the size
/// of its subtree in the dominator tree rooted at s.
inline DeltaVector decrease_es(const ProbGraph& g, VertexId s, std::uint64_t theta,
                               std::uint64_t master_seed, const VertexSet& blockers = {},
                               std::size_t threads = 1) {
  if (theta == 0) throw std::invalid_argument("decrease_es: theta must be positive");
  if (blockers.contains(s)) throw std::invalid_argument("decrease_es: the seed cannot be blocked");
  const std::size_t n = g.num_vertices();
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), theta);

  struct Partial {
    std::vector<std::uint64_t> sum, sum_sq;
    std::uint64_t reach = 0;
  };
  std::vector<Partial> partials(workers);
  parallel_blocks(workers, theta, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Partial& acc = partials[w];
    acc.sum.assign(n, 0);
    acc.sum_sq.assign(n, 0);
    LiveEdgeSampler sampler(n);
    DominatorBuilder builder;
    LiveEdgeSample sample;
    DominatorTree tree;
    for (std::size_t i = begin; i < end; ++i) {
      sampler.draw(g, s, blockers, master_seed, i, sample);
      builder.build(sample, tree);
      acc.reach += sample.reach_count();
      for (std::size_t pos = 1; pos < tree.size(); ++pos) {
        const std::uint64_t c = tree.subtree_size[pos];
        acc.sum[tree.order[pos]] += c;
        acc.sum_sq[tree.order[pos]] += c * c;
      }
    }
  });

  DeltaVector out;
  out.root = s;
  out.samples = theta;
  out.delta.assign(n, 0.0);
  out.std_error.assign(n, 0.0);
  std::uint64_t reach = 0;
  for (std::size_t w = 1; w < workers; ++w) {
    for (std::size_t v = 0; v < n; ++v) {
      partials[0].sum[v] += partials[w].sum[v];
      partials[0].sum_sq[v] += partials[w].sum_sq[v];
    }
  }
  for (const auto& p : partials) reach += p.reach;
  const double t = static_cast<double>(theta);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == s) continue;
    const auto sum = static_cast<double>(partials[0].sum[v]);
    out.delta[v] = sum / t;
    out.std_error[v] =
        detail::standard_error(sum, static_cast<double>(partials[0].sum_sq[v]), theta);
  }
  out.mean_reach = static_cast<double>(reach) / t;
  return out;
}

/// Expected dominator-subtree sizes computed over every live-edge world
/// instead of sampled ones: the exact value decrease_es converges to.
inline DeltaVector exact_decrease(const ProbGraph& g, VertexId s, const VertexSet& blockers = {},
                                  std::size_t budget = kDefaultOracleBudget) {
  if (blockers.contains(s)) throw std::invalid_argument("exact_decrease: the seed cannot be blocked");
  DeltaVector out;
  out.root = s;
  out.delta.assign(g.num_vertices(), 0.0);
  out.std_error.assign(g.num_vertices(), 0.0);
  LiveEdgeSampler sampler(g.num_vertices());
  DominatorBuilder builder;
  LiveEdgeSample sample;
  DominatorTree tree;
  const VertexId seeds[] = {s};
  detail::enumerate_worlds(g, seeds, blockers, budget, [&](double weight, auto&& keep) {
    sampler.materialize(g, s, blockers, keep, sample);
    builder.build(sample, tree);
    out.mean_reach += weight * static_cast<double>(sample.reach_count());
    for (std::size_t pos = 1; pos < tree.size(); ++pos)
      out.delta[tree.order[pos]] += weight * tree.subtree_size[pos];
  });
  return out;
}

}  // namespace imin
