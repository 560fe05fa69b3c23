#pragma once

// Live-edge sampling under the independent cascade model.
//
// A sample keeps every edge (u,v) independently with probability p(u,v).
// Coins are only flipped for edges whose source is reached from the root, in
// BFS order; the coin of edge e in sample i is counter_draw(key(master, i), e),
// so the reachable part of a sample does not depend on traversal details.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "imin/graph.hpp"
#include "imin/rng.hpp"

namespace imin {

/// Kept edges among the vertices reachable from the root, with local ids
/// assigned in BFS discovery order (local id 0 is the root).
struct LiveEdgeSample {
  const ProbGraph* parent = nullptr;
  VertexId root = kNoVertex;
  std::uint64_t index = 0;
  std::vector<VertexId> vertices;       // local -> global
  std::vector<std::uint32_t> offsets;   // CSR over local ids
  std::vector<std::uint32_t> targets;   // local ids

  std::size_t reach_count() const noexcept { return vertices.size(); }
  std::size_t num_edges() const noexcept { return targets.size(); }
  std::span<const std::uint32_t> successors(std::uint32_t local) const noexcept {
    return {targets.data() + offsets[local], offsets[local + 1] - offsets[local]};
  }
};

/// Coin for sample `index` of stream `master`.
class SampleCoin {
 public:
  SampleCoin(const ProbGraph& g, std::uint64_t master, std::uint64_t index)
      : graph_(&g), key_(derive_stream(master, index)) {}

  bool operator()(std::size_t e) const noexcept {
    const auto t = graph_->keep_threshold(e);
    return t == ProbGraph::kAlwaysKeep || counter_draw(key_, e) < t;
  }

 private:
  const ProbGraph* graph_;
  std::uint64_t key_;
};

/// Reusable scratch space for drawing samples on one graph. Not thread-safe;
/// use one sampler per worker.
class LiveEdgeSampler {
 public:
  explicit LiveEdgeSampler(std::size_t n) : local_(n, kUnseen) {}

  /// Materializes the reachable part of the live-edge graph defined by `keep`
  /// into `out`. Edges into blocked vertices are never kept.
  template <class KeepEdge>
  void materialize(const ProbGraph& g, VertexId root, const VertexSet& blocked, KeepEdge&& keep,
                   LiveEdgeSample& out) {
    out.parent = &g;
    out.root = root;
    out.vertices.clear();
    out.offsets.clear();
    out.targets.clear();
    out.vertices.push_back(root);
    local_[root] = 0;
    for (std::size_t head = 0; head < out.vertices.size(); ++head) {
      out.offsets.push_back(static_cast<std::uint32_t>(out.targets.size()));
      const VertexId u = out.vertices[head];
      for (std::size_t e = g.edge_begin(u), end = g.edge_end(u); e < end; ++e) {
        const VertexId v = g.target(e);
        if (blocked.contains(v) || !keep(e)) continue;
        if (local_[v] == kUnseen) {
          local_[v] = static_cast<std::uint32_t>(out.vertices.size());
          out.vertices.push_back(v);
        }
        out.targets.push_back(local_[v]);
      }
    }
    out.offsets.push_back(static_cast<std::uint32_t>(out.targets.size()));
    for (VertexId v : out.vertices) local_[v] = kUnseen;
  }

  void draw(const ProbGraph& g, VertexId root, const VertexSet& blocked, std::uint64_t master,
            std::uint64_t index, LiveEdgeSample& out) {
    materialize(g, root, blocked, SampleCoin(g, master, index), out);
    out.index = index;
  }

  /// Number of vertices reachable from the root, without storing edges.
  template <class KeepEdge>
  std::size_t reach(const ProbGraph& g, VertexId root, const VertexSet& blocked, KeepEdge&& keep) {
    queue_.clear();
    queue_.push_back(root);
    local_[root] = 0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const VertexId u = queue_[head];
      for (std::size_t e = g.edge_begin(u), end = g.edge_end(u); e < end; ++e) {
        const VertexId v = g.target(e);
        if (local_[v] != kUnseen || blocked.contains(v) || !keep(e)) continue;
        local_[v] = 0;
        queue_.push_back(v);
      }
    }
    for (VertexId v : queue_) local_[v] = kUnseen;
    return queue_.size();
  }

 private:
  static constexpr std::uint32_t kUnseen = 0xffffffffu;
  std::vector<std::uint32_t> local_;
  std::vector<VertexId> queue_;
};

inline LiveEdgeSample sample_live_edge(const ProbGraph& g, VertexId s, std::uint64_t master_seed,
                                       std::uint64_t index, const VertexSet& blocked = {}) {
  LiveEdgeSample out;
  LiveEdgeSampler(g.num_vertices()).draw(g, s, blocked, master_seed, index, out);
  return out;
}

/// Vertices reachable from the root in the sample, the root included.
inline std::size_t reach_count(const LiveEdgeSample& sample) noexcept { return sample.reach_count(); }

/// Samples needed for a (1 +/- eps) spread estimate with probability at least
/// 1 - n^-ell, given a lower bound on the optimum spread:
/// ceil(ell (2 + eps) n ln n / (eps^2 opt)).
inline std::uint64_t required_samples(std::size_t n, double eps, double ell, double opt_lower_bound) {
  if (!(eps > 0) || !(ell > 0) || !(opt_lower_bound > 0) || n == 0)
    throw std::invalid_argument("required_samples: arguments must be positive");
  const double nn = static_cast<double>(n);
  return static_cast<std::uint64_t>(
      std::ceil(ell * (2.0 + eps) * nn * std::log(nn) / (eps * eps * opt_lower_bound)));
}

}  // namespace imin
