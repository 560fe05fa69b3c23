#pragma once

// Dominator trees of live-edge samples (Lengauer-Tarjan, simple eval/link
// with path compression), plus dominated-subtree sizes.
//
// In a sample g rooted at s, the subtree of u in the dominator tree is exactly
// the set of vertices that s can no longer reach once u is removed.

#include <cstdint>
#include <ostream>
#include <vector>

#include "imin/graph.hpp"
#include "imin/live_edge.hpp"

namespace imin {

/// Indexed by DFS preorder position; position 0 is the root.
struct DominatorTree {
  VertexId root = kNoVertex;
  std::vector<VertexId> order;                // preorder position -> global vertex
  std::vector<std::uint32_t> idom;            // position of the immediate dominator; idom[0] == 0
  std::vector<std::uint32_t> subtree_size;    // vertices in the subtree, itself included

  std::size_t size() const noexcept { return order.size(); }

  /// "u idom(u) subtree_size(u)" per line in preorder, external ids; the root's
  /// idom is written as '-'.
  void dump(std::ostream& out, const ProbGraph& g) const {
    for (std::size_t i = 0; i < order.size(); ++i) {
      out << g.external_id(order[i]) << ' ';
      if (i == 0)
        out << '-';
      else
        out << g.external_id(order[idom[i]]);
      out << ' ' << subtree_size[i] << '\n';
    }
  }
};

/// Subtree sizes from the idom array. idom[w] precedes w in preorder, so one
/// backward scan accumulates every subtree.
inline std::vector<std::uint32_t> subtree_sizes(const DominatorTree& t) {
  std::vector<std::uint32_t> size(t.size(), 1);
  for (std::size_t w = t.size(); w-- > 1;) size[t.idom[w]] += size[w];
  return size;
}

class DominatorBuilder {
 public:
  void build(const LiveEdgeSample& sample, DominatorTree& out) {
    const auto k = static_cast<std::uint32_t>(sample.reach_count());
    prepare(k);
    number_vertices(sample);
    build_predecessors(sample, k);

    // Semidominators and relative dominators, all in preorder space.
    for (std::uint32_t w = k; w-- > 1;) {
      for (std::uint32_t i = pred_offsets_[w]; i < pred_offsets_[w + 1]; ++i) {
        const std::uint32_t u = eval(preds_[i]);
        if (semi_[u] < semi_[w]) semi_[w] = semi_[u];
      }
      bucket_next_[w] = bucket_head_[semi_[w]];
      bucket_head_[semi_[w]] = w;
      const std::uint32_t p = parent_[w];
      ancestor_[w] = p;
      for (std::uint32_t v = bucket_head_[p]; v != kNone; v = bucket_next_[v]) {
        const std::uint32_t u = eval(v);
        idom_[v] = semi_[u] < semi_[v] ? u : p;
      }
      bucket_head_[p] = kNone;
    }
    for (std::uint32_t w = 1; w < k; ++w)
      if (idom_[w] != semi_[w]) idom_[w] = idom_[idom_[w]];
    idom_[0] = 0;

    out.root = sample.root;
    out.order.resize(k);
    for (std::uint32_t i = 0; i < k; ++i) out.order[i] = sample.vertices[vertex_of_[i]];
    out.idom.assign(idom_.begin(), idom_.begin() + k);
    out.subtree_size.assign(k, 1);
    for (std::uint32_t w = k; w-- > 1;) out.subtree_size[out.idom[w]] += out.subtree_size[w];
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  void prepare(std::uint32_t k) {
    for (auto* v : {&dfn_, &vertex_of_, &parent_, &semi_, &idom_, &ancestor_, &label_,
                    &bucket_head_, &bucket_next_})
      v->resize(k);
    std::fill(dfn_.begin(), dfn_.begin() + k, kNone);
    std::fill(ancestor_.begin(), ancestor_.begin() + k, kNone);
    std::fill(bucket_head_.begin(), bucket_head_.begin() + k, kNone);
  }

  // Iterative DFS from local 0 assigning preorder numbers.
  void number_vertices(const LiveEdgeSample& sample) {
    std::uint32_t next = 0;
    stack_.clear();
    dfn_[0] = next;
    vertex_of_[next] = 0;
    parent_[next] = 0;
    ++next;
    stack_.push_back({0, sample.offsets[0]});
    while (!stack_.empty()) {
      auto& [v, cursor] = stack_.back();
      if (cursor == sample.offsets[v + 1]) {
        stack_.pop_back();
        continue;
      }
      const std::uint32_t w = sample.targets[cursor++];
      if (dfn_[w] != kNone) continue;
      dfn_[w] = next;
      vertex_of_[next] = w;
      parent_[next] = dfn_[v];
      ++next;
      stack_.push_back({w, sample.offsets[w]});
    }
    for (std::uint32_t i = 0; i < next; ++i) {
      semi_[i] = i;
      label_[i] = i;
    }
  }

  void build_predecessors(const LiveEdgeSample& sample, std::uint32_t k) {
    pred_offsets_.assign(k + 1, 0);
    for (std::uint32_t t : sample.targets) ++pred_offsets_[dfn_[t] + 1];
    for (std::uint32_t i = 0; i < k; ++i) pred_offsets_[i + 1] += pred_offsets_[i];
    preds_.resize(sample.targets.size());
    fill_.assign(pred_offsets_.begin(), pred_offsets_.end() - 1);
    for (std::uint32_t v = 0; v < k; ++v)
      for (std::uint32_t i = sample.offsets[v]; i < sample.offsets[v + 1]; ++i)
        preds_[fill_[dfn_[sample.targets[i]]]++] = dfn_[v];
  }

  std::uint32_t eval(std::uint32_t v) {
    if (ancestor_[v] == kNone) return v;
    compress(v);
    return label_[v];
  }

  void compress(std::uint32_t v) {
    path_.clear();
    while (ancestor_[ancestor_[v]] != kNone) {
      path_.push_back(v);
      v = ancestor_[v];
    }
    while (!path_.empty()) {
      const std::uint32_t x = path_.back();
      path_.pop_back();
      const std::uint32_t a = ancestor_[x];
      if (semi_[label_[a]] < semi_[label_[x]]) label_[x] = label_[a];
      ancestor_[x] = ancestor_[a];
    }
  }

  struct Frame {
    std::uint32_t vertex;
    std::uint32_t cursor;
  };

  std::vector<std::uint32_t> dfn_, vertex_of_, parent_, semi_, idom_, ancestor_, label_;
  std::vector<std::uint32_t> bucket_head_, bucket_next_;
  std::vector<std::uint32_t> pred_offsets_, preds_, fill_, path_;
  std::vector<Frame> stack_;
};

inline DominatorTree build_domtree(const LiveEdgeSample& sample) {
  DominatorTree t;
  DominatorBuilder().build(sample, t);
  return t;
}

}  // namespace imin
