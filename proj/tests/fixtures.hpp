#pragma once

// Shared test fixtures and brute-force oracles. Nothing here calls into the
// sampling or dominator code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "imin/graph.hpp"
#include "imin/live_edge.hpp"

namespace imin::testing {

/// The nine-vertex toy graph with seed v1. External ids are 1..9, so vertex
/// v_i has internal id i - 1.
inline ProbGraph toy_graph() {
  std::istringstream in(
      "1 2 1\n1 4 1\n2 5 1\n4 5 1\n5 3 1\n5 6 1\n5 9 1\n5 8 0.5\n9 8 0.2\n8 7 0.1\n");
  return load_edge_list(in, /*directed=*/true, "toy");
}

constexpr VertexId v(int i) { return static_cast<VertexId>(i - 1); }

inline Instance toy_instance() { return single_seed(toy_graph(), v(1)); }

inline VertexSet set_of(const ProbGraph& g, std::initializer_list<VertexId> members) {
  return VertexSet(g.num_vertices(), std::vector<VertexId>(members));
}

struct RandomGraphSpec {
  std::size_t n = 8;
  std::size_t m = 14;
  std::size_t max_uncertain = 12;
  double certain_prob = 1.0;
};

/// Random simple digraph; at most `max_uncertain` edges get a probability
/// strictly inside (0,1), the rest get `certain_prob`.
inline ProbGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec) {
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(spec.n - 1));
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<Edge> edges;
  const std::size_t max_edges = spec.n * (spec.n - 1);
  while (edges.size() < std::min(spec.m, max_edges)) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a == b || !seen.insert({a, b}).second) continue;
    edges.push_back({a, b, spec.certain_prob});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  for (std::size_t i = 0; i < std::min(spec.max_uncertain, edges.size()); ++i) edges[i].prob = prob(rng);
  return ProbGraph::from_edges(spec.n, std::move(edges));
}

/// Random graph with every edge probability drawn from (0,1).
inline ProbGraph random_prob_graph(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  RandomGraphSpec spec{n, m, m, 1.0};
  return random_graph(rng, spec);
}

/// Plain adjacency-list digraph used by reachability oracles.
struct Digraph {
  std::vector<std::vector<std::uint32_t>> out;
};

inline Digraph to_digraph(const LiveEdgeSample& s) {
  Digraph d;
  d.out.resize(s.reach_count());
  for (std::uint32_t u = 0; u < s.reach_count(); ++u)
    for (auto w : s.successors(u)) d.out[u].push_back(w);
  return d;
}

/// Vertices reachable from `root` when `removed` (if any) is deleted.
inline std::vector<char> reachable(const Digraph& d, std::uint32_t root,
                                   std::uint32_t removed = 0xffffffffu) {
  std::vector<char> seen(d.out.size(), 0);
  if (root == removed) return seen;
  std::vector<std::uint32_t> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto w : d.out[u])
      if (w != removed && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return seen;
}

inline std::size_t count(const std::vector<char>& flags) {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

}  // namespace imin::testing
