#pragma once

// Probabilistic directed graph, edge-list ingestion, probability models and
// the multi-seed to single-seed reduction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <charconv>
#include <vector>

#include "imin/rng.hpp"

namespace imin {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/// Malformed input or an invalid argument derived from input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation refused because it would exceed a configured budget.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId source;
  VertexId target;
  double prob;
};

/// Vertex subset over a fixed universe. A default-constructed set is empty and
/// answers `contains` with false for every vertex.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe) : flags_(universe, 0) {}
  VertexSet(std::size_t universe, std::span<const VertexId> members) : flags_(universe, 0) {
    for (VertexId v : members) insert(v);
  }

  bool contains(VertexId v) const noexcept { return v < flags_.size() && flags_[v] != 0; }
  void insert(VertexId v) {
    if (v >= flags_.size()) flags_.resize(v + 1, 0);
    if (!flags_[v]) {
      flags_[v] = 1;
      ++count_;
    }
  }
  void erase(VertexId v) {
    if (contains(v)) {
      flags_[v] = 0;
      --count_;
    }
  }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::vector<VertexId> members() const {
    std::vector<VertexId> out;
    out.reserve(count_);
    for (std::size_t v = 0; v < flags_.size(); ++v)
      if (flags_[v]) out.push_back(static_cast<VertexId>(v));
    return out;
  }

 private:
  std::vector<char> flags_;
  std::size_t count_ = 0;
};

/// Directed graph in CSR form with one activation probability per edge.
///
/// Immutable after construction. Out-edges of every vertex are sorted by
/// target, self-loops are absent and parallel edges have been merged with the
/// noisy-or rule p = 1 - prod(1 - p_i). A probability of NaN marks an edge
/// whose probability has not been assigned yet.
class ProbGraph {
 public:
  static constexpr std::uint64_t kAlwaysKeep = std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint64_t kNoExternalId = std::numeric_limits<std::uint64_t>::max();

  ProbGraph() = default;

  static ProbGraph from_edges(std::size_t n, std::vector<Edge> edges, bool directed = true,
                              std::vector<std::uint64_t> external_ids = {}) {
    for (const Edge& e : edges) {
      if (e.source >= n || e.target >= n)
        throw DataError("edge endpoint out of range");
      if (!std::isnan(e.prob) && !(e.prob >= 0.0 && e.prob <= 1.0))
        throw DataError("edge probability outside [0,1]");
    }
    std::erase_if(edges, [](const Edge& e) { return e.source == e.target; });
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.source != b.source ? a.source < b.source : a.target < b.target;
    });

    ProbGraph g;
    g.n_ = n;
    g.directed_ = directed;
    g.offsets_.assign(n + 1, 0);
    g.in_degree_.assign(n, 0);
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t j = i;
      double survive = 1.0;
      while (j < edges.size() && edges[j].source == edges[i].source &&
             edges[j].target == edges[i].target) {
        survive *= 1.0 - edges[j].prob;
        ++j;
      }
      const double p = (j - i == 1) ? edges[i].prob : 1.0 - survive;
      g.targets_.push_back(edges[i].target);
      g.probs_.push_back(p);
      ++g.offsets_[edges[i].source + 1];
      ++g.in_degree_[edges[i].target];
      i = j;
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

    if (external_ids.empty()) {
      external_ids.resize(n);
      std::iota(external_ids.begin(), external_ids.end(), std::uint64_t{0});
    } else if (external_ids.size() != n) {
      throw DataError("external id table does not match vertex count");
    }
    g.external_ids_ = std::move(external_ids);
    g.refresh_thresholds();
    return g;
  }

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return targets_.size(); }
  bool directed() const noexcept { return directed_; }
  bool has_probabilities() const noexcept {
    return std::none_of(probs_.begin(), probs_.end(), [](double p) { return std::isnan(p); });
  }

  std::size_t edge_begin(VertexId u) const noexcept { return offsets_[u]; }
  std::size_t edge_end(VertexId u) const noexcept { return offsets_[u + 1]; }
  std::size_t out_degree(VertexId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  std::size_t in_degree(VertexId v) const noexcept { return in_degree_[v]; }

  VertexId target(std::size_t e) const noexcept { return targets_[e]; }
  double prob(std::size_t e) const noexcept { return probs_[e]; }
  /// An edge is kept by a uniform 64-bit draw x iff threshold == kAlwaysKeep or x < threshold.
  std::uint64_t keep_threshold(std::size_t e) const noexcept { return thresholds_[e]; }

  std::span<const VertexId> out_targets(VertexId u) const noexcept {
    return {targets_.data() + offsets_[u], out_degree(u)};
  }
  std::span<const double> out_probs(VertexId u) const noexcept {
    return {probs_.data() + offsets_[u], out_degree(u)};
  }

  std::uint64_t external_id(VertexId v) const noexcept { return external_ids_[v]; }
  std::span<const std::uint64_t> external_ids() const noexcept { return external_ids_; }

  std::optional<VertexId> find_external(std::uint64_t id) const {
    auto it = std::find(external_ids_.begin(), external_ids_.end(), id);
    if (it == external_ids_.end()) return std::nullopt;
    return static_cast<VertexId>(it - external_ids_.begin());
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (VertexId u = 0; u < n_; ++u)
      for (std::size_t e = edge_begin(u); e < edge_end(u); ++e)
        out.push_back({u, targets_[e], probs_[e]});
    return out;
  }

  /// Copy of this graph with edge probabilities replaced, indexed by edge id.
  ProbGraph with_probabilities(std::vector<double> probs) const {
    if (probs.size() != num_edges()) throw DataError("probability vector does not match edge count");
    for (double p : probs)
      if (!(p >= 0.0 && p <= 1.0)) throw DataError("edge probability outside [0,1]");
    ProbGraph g = *this;
    g.probs_ = std::move(probs);
    g.refresh_thresholds();
    return g;
  }

  friend bool operator==(const ProbGraph& a, const ProbGraph& b) {
    auto same_probs = [&] {
      for (std::size_t e = 0; e < a.probs_.size(); ++e) {
        const double x = a.probs_[e], y = b.probs_[e];
        if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
      }
      return true;
    };
    return a.n_ == b.n_ && a.directed_ == b.directed_ && a.offsets_ == b.offsets_ &&
           a.targets_ == b.targets_ && a.in_degree_ == b.in_degree_ &&
           a.external_ids_ == b.external_ids_ && a.probs_.size() == b.probs_.size() && same_probs();
  }

 private:
  void refresh_thresholds() {
    thresholds_.resize(probs_.size());
    for (std::size_t e = 0; e < probs_.size(); ++e) {
      const double p = probs_[e];
      if (std::isnan(p) || p <= 0.0)
        thresholds_[e] = 0;
      else if (p >= 1.0)
        thresholds_[e] = kAlwaysKeep;
      else
        thresholds_[e] = static_cast<std::uint64_t>(std::ldexp(p, 64));
    }
  }

  std::size_t n_ = 0;
  bool directed_ = true;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> targets_;
  std::vector<double> probs_;
  std::vector<std::uint64_t> thresholds_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<std::uint64_t> external_ids_;
};

// ---------------------------------------------------------------------------
// Ingestion

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_u64(std::string_view tok, std::uint64_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

inline bool parse_prob(std::string_view tok, double& out) {
  // from_chars for double is unavailable on some toolchains; strtod on a copy.
  std::string copy(tok);
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return end == copy.c_str() + copy.size() && out >= 0.0 && out <= 1.0;
}

inline constexpr std::string_view kCanonicalTag = "canonical";

}  // namespace detail

/// Reads a whitespace-separated edge list ("u v" or "u v p" per line, '#'
/// comments). Vertex ids are remapped densely in ascending order of their
/// external value. An undirected list contributes both directions per line.
/// Self-loop lines are validated and then ignored.
/// A first line "# canonical n m directed|undirected" marks a canonical dump:
/// its edges are taken as already directed and the header's flag is kept.
inline ProbGraph load_edge_list(std::istream& in, bool directed, std::string_view name = "input") {
  struct RawEdge {
    std::uint64_t u, v;
    double p;
  };
  std::vector<RawEdge> raw;
  std::optional<std::size_t> columns;
  std::optional<std::size_t> canonical_n, canonical_m;
  bool expand_undirected = !directed;
  bool directed_flag = directed;

  auto fail = [&](std::size_t line_no, const std::string& what) {
    throw DataError(std::string(name) + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (line_no == 1) {
        auto toks = detail::split_ws(body.substr(1));
        if (toks.size() == 4 && toks[0] == detail::kCanonicalTag) {
          std::uint64_t n = 0, m = 0;
          if (!detail::parse_u64(toks[1], n) || !detail::parse_u64(toks[2], m) ||
              (toks[3] != "directed" && toks[3] != "undirected"))
            fail(line_no, "malformed canonical header");
          canonical_n = n;
          canonical_m = m;
          directed_flag = toks[3] == "directed";
          expand_undirected = false;
        }
      }
      continue;
    }
    auto toks = detail::split_ws(body);
    if (toks.size() != 2 && toks.size() != 3) fail(line_no, "expected 'u v' or 'u v p'");
    if (columns && *columns != toks.size()) fail(line_no, "inconsistent column count");
    columns = toks.size();
    RawEdge e{0, 0, std::numeric_limits<double>::quiet_NaN()};
    if (!detail::parse_u64(toks[0], e.u) || !detail::parse_u64(toks[1], e.v))
      fail(line_no, "vertex id is not a nonnegative integer");
    if (e.u == ProbGraph::kNoExternalId || e.v == ProbGraph::kNoExternalId)
      fail(line_no, "vertex id out of range");
    if (toks.size() == 3 && !detail::parse_prob(toks[2], e.p))
      fail(line_no, "probability is not a number in [0,1]");
    if (e.u == e.v) continue;  // self-loops carry no influence and introduce no vertex
    raw.push_back(e);
  }
  if (raw.empty()) throw DataError(std::string(name) + ": empty edge list");

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&](std::uint64_t id) {
    return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Edge> edges;
  edges.reserve(raw.size() * (expand_undirected ? 2 : 1));
  for (const auto& e : raw) {
    edges.push_back({dense(e.u), dense(e.v), e.p});
    if (expand_undirected) edges.push_back({dense(e.v), dense(e.u), e.p});
  }
  const std::size_t n = ids.size();
  ProbGraph g = ProbGraph::from_edges(n, std::move(edges), directed_flag, std::move(ids));
  if (canonical_n && (*canonical_n != g.num_vertices() || *canonical_m != g.num_edges()))
    throw DataError(std::string(name) + ": canonical header does not match edge list");
  return g;
}

inline ProbGraph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_edge_list(in, directed, path);
}

inline std::string format_prob(double p) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

/// Canonical dump: a "# canonical n m directed|undirected" header followed by
/// "u v p" lines (external ids, p at 17 significant digits) sorted by (u, v).
/// Without assigned probabilities the lines are "u v".
inline void write_canonical(std::ostream& out, const ProbGraph& g) {
  out << "# " << detail::kCanonicalTag << ' ' << g.num_vertices() << ' ' << g.num_edges() << ' '
      << (g.directed() ? "directed" : "undirected") << '\n';
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    const auto au = g.external_id(a.source), bu = g.external_id(b.source);
    return au != bu ? au < bu : g.external_id(a.target) < g.external_id(b.target);
  });
  const bool with_probs = g.has_probabilities();
  for (const Edge& e : edges) {
    out << g.external_id(e.source) << ' ' << g.external_id(e.target);
    if (with_probs) out << ' ' << format_prob(e.prob);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Probability models

struct ProbModel {
  enum class Kind { Trivalency, WeightedCascade, Explicit };
  Kind kind = Kind::WeightedCascade;
  /// Trivalency only: use this probability on every edge instead of drawing.
  std::optional<double> fixed;

  static ProbModel trivalency() { return {Kind::Trivalency, std::nullopt}; }
  static ProbModel uniform(double p) { return {Kind::Trivalency, p}; }
  static ProbModel weighted_cascade() { return {Kind::WeightedCascade, std::nullopt}; }
  static ProbModel explicit_probs() { return {Kind::Explicit, std::nullopt}; }
};

inline constexpr double kTrivalencyValues[3] = {0.1, 0.01, 0.001};

/// Assigns edge probabilities. Trivalency draws for edge e depend only on
/// (rng_seed, e); weighted cascade sets p(u,v) = 1 / in_degree(v).
inline ProbGraph assign_probs(const ProbGraph& g, const ProbModel& model, std::uint64_t rng_seed) {
  std::vector<double> probs(g.num_edges());
  switch (model.kind) {
    case ProbModel::Kind::Trivalency: {
      const auto key = derive_stream(rng_seed, streams::kProbabilities);
      for (std::size_t e = 0; e < probs.size(); ++e)
        probs[e] = model.fixed ? *model.fixed : kTrivalencyValues[counter_draw(key, e) % 3];
      break;
    }
    case ProbModel::Kind::WeightedCascade:
      for (std::size_t e = 0; e < probs.size(); ++e)
        probs[e] = 1.0 / static_cast<double>(g.in_degree(g.target(e)));
      break;
    case ProbModel::Kind::Explicit:
      if (!g.has_probabilities()) throw DataError("explicit model requires 'u v p' lines");
      return g;
  }
  return g.with_probabilities(std::move(probs));
}

// ---------------------------------------------------------------------------
// Seeds

/// A single-source problem instance. For several seeds, `graph` carries an
/// extra vertex `root` standing in for all of them; the original seeds remain
/// as isolated vertices and are never eligible as blockers.
struct Instance {
  ProbGraph graph;
  VertexId root = kNoVertex;
  std::vector<VertexId> seeds;

  /// Added to spreads measured on `graph` so they count every original seed.
  double spread_offset() const noexcept {
    return seeds.empty() ? 0.0 : static_cast<double>(seeds.size() - 1);
  }

  bool is_excluded(VertexId v) const noexcept {
    return v == root || std::find(seeds.begin(), seeds.end(), v) != seeds.end();
  }

  /// Vertices that may be blocked, ascending.
  std::vector<VertexId> candidates() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < graph.num_vertices(); ++v)
      if (!is_excluded(v)) out.push_back(v);
    return out;
  }
};

/// Replaces a seed set by one source. Edges out of the seeds are merged into
/// edges from a new vertex with p = 1 - prod(1 - p_i) per target, and edges
/// between or into seeds are dropped. One seed is kept as is.
inline Instance unify_seeds(ProbGraph g, std::span<const VertexId> seeds) {
  if (seeds.empty()) throw DataError("seed set is empty");
  const std::size_t n = g.num_vertices();
  VertexSet seed_set(n);
  for (VertexId s : seeds) {
    if (s >= n) throw DataError("seed id " + std::to_string(s) + " out of range");
    if (seed_set.contains(s)) throw DataError("duplicate seed " + std::to_string(s));
    seed_set.insert(s);
  }
  std::vector<VertexId> seed_list(seeds.begin(), seeds.end());
  if (seeds.size() == 1) return Instance{std::move(g), seeds.front(), std::move(seed_list)};

  if (!g.has_probabilities()) throw DataError("seed unification requires assigned probabilities");
  const auto root = static_cast<VertexId>(n);
  std::vector<double> survive(n, 1.0);
  std::vector<char> touched(n, 0);
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    if (seed_set.contains(e.target)) continue;
    if (seed_set.contains(e.source)) {
      survive[e.target] *= 1.0 - e.prob;
      touched[e.target] = 1;
    } else {
      edges.push_back(e);
    }
  }
  for (VertexId v = 0; v < n; ++v)
    if (touched[v]) edges.push_back({root, v, 1.0 - survive[v]});

  std::vector<std::uint64_t> ids(g.external_ids().begin(), g.external_ids().end());
  ids.push_back(ProbGraph::kNoExternalId);
  return Instance{ProbGraph::from_edges(n + 1, std::move(edges), g.directed(), std::move(ids)), root,
                  std::move(seed_list)};
}

inline Instance single_seed(ProbGraph g, VertexId s) {
  const VertexId seeds[] = {s};
  return unify_seeds(std::move(g), seeds);
}

}  // namespace imin
