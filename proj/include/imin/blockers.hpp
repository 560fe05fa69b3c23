#pragma once

// Blocker selection: BaselineGreedy, AdvancedGreedy, GreedyReplace and the
// Rand / OutDegree / Exact baselines.
//
// The greedy procedures are templates over how spread (or spread decrease) is
// obtained, so the same selection logic runs on sampled estimates and on the
// exact oracle.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "imin/graph.hpp"
#include "imin/rng.hpp"
#include "imin/spread.hpp"

namespace imin {

enum class Algorithm { BaselineGreedy, AdvancedGreedy, GreedyReplace, Rand, OutDegree, Exact };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::BaselineGreedy, Algorithm::AdvancedGreedy,
                                               Algorithm::GreedyReplace,  Algorithm::Rand,
                                               Algorithm::OutDegree,      Algorithm::Exact};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BaselineGreedy: return "bg";
    case Algorithm::AdvancedGreedy: return "ag";
    case Algorithm::GreedyReplace: return "gr";
    case Algorithm::Rand: return "rand";
    case Algorithm::OutDegree: return "outdeg";
    case Algorithm::Exact: return "exact";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms)
    if (name == to_string(a)) return a;
  return std::nullopt;
}

struct SelectionOptions {
  std::uint64_t theta = 10000;        // sampled graphs per spread-decrease computation
  std::uint64_t rounds = 10000;       // MCS rounds per spread evaluation inside selection
  std::uint64_t eval_rounds = 100000; // MCS rounds for the reported residual spread
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  /// Residual spreads are computed exactly when the world count fits this budget.
  std::size_t exact_eval_budget = 16;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct BlockerResult {
  Algorithm algorithm = Algorithm::AdvancedGreedy;
  std::size_t budget = 0;
  std::vector<VertexId> blockers;  // insertion order
  SpreadEstimate residual;         // includes every original seed
  std::uint64_t samples = 0;       // theta or rounds used by the selection
  double duration_ms = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<std::string> deviations;
};

namespace detail {

inline void check_deadline(const SelectionOptions& opt) {
  if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline)
    throw TimeoutError("selection exceeded its time limit");
}

/// Smallest eligible id whose score is within `tolerance` of the maximum;
/// `preferred`, when eligible and within tolerance, wins over every other id.
template <class Eligible>
VertexId argmax(std::span<const double> score, Eligible&& eligible, double tolerance,
                VertexId preferred = kNoVertex) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (VertexId v = 0; v < score.size(); ++v)
    if (eligible(v) && score[v] > best) {
      best = score[v];
      any = true;
    }
  if (!any) return kNoVertex;
  if (preferred != kNoVertex && eligible(preferred) && score[preferred] >= best - tolerance)
    return preferred;
  for (VertexId v = 0; v < score.size(); ++v)
    if (eligible(v) && score[v] >= best - tolerance) return v;
  return kNoVertex;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spread sources

/// Sampled spread decrease on G[V \ B]; every call draws a fresh stream.
struct SampledDecrease {
  std::uint64_t theta;
  std::uint64_t master_seed;
  std::size_t threads = 1;

  std::vector<double> operator()(const Instance& inst, const VertexSet& blocked,
                                 std::uint64_t call) const {
    return decrease_es(inst.graph, inst.root, theta, derive_stream(master_seed, call), blocked, threads)
        .delta;
  }
};

/// Expected dominator-subtree sizes from world enumeration.
struct ExactDecrease {
  std::size_t budget = kDefaultOracleBudget;

  std::vector<double> operator()(const Instance& inst, const VertexSet& blocked, std::uint64_t) const {
    return exact_decrease(inst.graph, inst.root, blocked, budget).delta;
  }
};

/// Monte-Carlo spread of G[V \ B]; `call` and the candidate pick the stream.
struct McsSpread {
  std::uint64_t rounds;
  std::uint64_t master_seed;
  std::size_t threads = 1;

  double operator()(const Instance& inst, const VertexSet& blocked, std::uint64_t call) const {
    return mcs_spread(inst.graph, inst.root, blocked, rounds, derive_stream(master_seed, call), threads)
        .value;
  }
};

struct ExactSpreadSource {
  std::size_t budget = kDefaultOracleBudget;

  double operator()(const Instance& inst, const VertexSet& blocked, std::uint64_t) const {
    return exact_spread(inst.graph, inst.root, blocked, budget).estimate.value;
  }
};

/// Ties in scores computed from floating-point expectations are only decided
/// up to this tolerance; integer-accumulated sample means tie exactly anyway.
inline constexpr double kTieTolerance = 1e-9;

/// Residual spread of `blockers`: exact when the oracle fits
/// `exact_eval_budget`, otherwise MCS on an evaluation stream that is
/// independent of every selection stream.
inline SpreadEstimate evaluate_spread(const Instance& inst, std::span<const VertexId> blockers,
                                      const SelectionOptions& opt) {
  const VertexSet blocked(inst.graph.num_vertices(), blockers);
  SpreadEstimate est;
  if (oracle_feasible(inst.graph, inst.root, blocked, opt.exact_eval_budget))
    est = exact_spread(inst.graph, inst.root, blocked, opt.exact_eval_budget).estimate;
  else
    est = mcs_spread(inst.graph, inst.root, blocked, opt.eval_rounds,
                     derive_stream(opt.master_seed, streams::kEvaluation), opt.threads);
  est.value += inst.spread_offset();
  return est;
}

// ---------------------------------------------------------------------------
// Greedy procedures (selection only)

/// BaselineGreedy: each round blocks the candidate whose blocking gives the
/// smallest spread. `spread(inst, blocked, stream)` evaluates one blocker set;
/// candidates the root cannot reach leave the spread unchanged and are scored
/// without evaluation.
template <class SpreadFn>
std::vector<VertexId> baseline_greedy_with(const Instance& inst, std::size_t budget, SpreadFn&& spread,
                                           double tolerance = kTieTolerance,
                                           const SelectionOptions* opt = nullptr) {
  const ProbGraph& g = inst.graph;
  const std::size_t n = g.num_vertices();
  VertexSet blocked(n);
  std::vector<VertexId> chosen;
  std::uint64_t stream = 0;
  for (std::size_t round = 0; round < budget; ++round) {
    if (opt) detail::check_deadline(*opt);
    const auto reachable = [&] {
      std::vector<char> seen(n, 0);
      std::vector<VertexId> queue{inst.root};
      seen[inst.root] = 1;
      for (std::size_t h = 0; h < queue.size(); ++h)
        for (std::size_t e = g.edge_begin(queue[h]); e < g.edge_end(queue[h]); ++e) {
          const VertexId v = g.target(e);
          if (!seen[v] && !blocked.contains(v) && g.prob(e) > 0.0) {
            seen[v] = 1;
            queue.push_back(v);
          }
        }
      return seen;
    }();
    const double base = spread(inst, blocked, stream++);
    std::vector<double> decrease(n, 0.0);
    for (VertexId u = 0; u < n; ++u) {
      if (inst.is_excluded(u) || blocked.contains(u) || !reachable[u]) continue;
      blocked.insert(u);
      decrease[u] = base - spread(inst, blocked, stream++);
      blocked.erase(u);
    }
    const VertexId x = detail::argmax(
        decrease, [&](VertexId v) { return !inst.is_excluded(v) && !blocked.contains(v); }, tolerance);
    if (x == kNoVertex) break;
    blocked.insert(x);
    chosen.push_back(x);
  }
  return chosen;
}

/// AdvancedGreedy: each round recomputes the spread decrease of every vertex
/// on the current G[V \ B] and blocks the largest.
template <class DecreaseFn>
std::vector<VertexId> advanced_greedy_with(const Instance& inst, std::size_t budget,
                                           DecreaseFn&& decrease, double tolerance = kTieTolerance,
                                           const SelectionOptions* opt = nullptr,
                                           std::vector<VertexId> chosen = {},
                                           std::uint64_t first_call = 0) {
  VertexSet blocked(inst.graph.num_vertices(), chosen);
  std::uint64_t call = first_call;
  while (chosen.size() < budget) {
    if (opt) detail::check_deadline(*opt);
    const auto delta = decrease(inst, blocked, call++);
    const VertexId x = detail::argmax(
        delta, [&](VertexId v) { return !inst.is_excluded(v) && !blocked.contains(v); }, tolerance);
    if (x == kNoVertex) break;
    blocked.insert(x);
    chosen.push_back(x);
  }
  return chosen;
}

struct ReplaceOutcome {
  std::vector<VertexId> blockers;
  std::vector<VertexId> initial;  // out-neighbour phase result
  bool topped_up = false;
};

/// GreedyReplace. Phase one picks greedily among the root's out-neighbours.
/// Phase two visits those blockers in reverse insertion order, lifts each one
/// and blocks the best vertex of the whole graph in its place, stopping at the
/// first blocker that is re-chosen. If the root has fewer than `budget`
/// out-neighbours, the remaining budget is filled with AdvancedGreedy rounds.
template <class DecreaseFn>
ReplaceOutcome greedy_replace_with(const Instance& inst, std::size_t budget, DecreaseFn&& decrease,
                                   double tolerance = kTieTolerance,
                                   const SelectionOptions* opt = nullptr) {
  const ProbGraph& g = inst.graph;
  VertexSet out_neighbours(g.num_vertices());
  for (VertexId v : g.out_targets(inst.root))
    if (!inst.is_excluded(v)) out_neighbours.insert(v);

  VertexSet blocked(g.num_vertices());
  std::vector<VertexId> chosen;
  std::uint64_t call = 0;
  const std::size_t phase_one = std::min(budget, out_neighbours.size());
  while (chosen.size() < phase_one) {
    if (opt) detail::check_deadline(*opt);
    const auto delta = decrease(inst, blocked, call++);
    const VertexId x = detail::argmax(
        delta, [&](VertexId v) { return out_neighbours.contains(v) && !blocked.contains(v); },
        tolerance);
    if (x == kNoVertex) break;
    blocked.insert(x);
    chosen.push_back(x);
  }

  ReplaceOutcome outcome;
  outcome.initial = chosen;
  for (std::size_t i = chosen.size(); i-- > 0;) {
    if (opt) detail::check_deadline(*opt);
    const VertexId u = chosen[i];
    blocked.erase(u);
    const auto delta = decrease(inst, blocked, call++);
    const VertexId x = detail::argmax(
        delta, [&](VertexId v) { return !inst.is_excluded(v) && !blocked.contains(v); }, tolerance,
        u);
    blocked.insert(x);
    chosen[i] = x;
    if (x == u) break;
  }

  if (chosen.size() < budget) {
    const std::size_t before = chosen.size();
    chosen = advanced_greedy_with(inst, budget, decrease, tolerance, opt, std::move(chosen), call);
    outcome.topped_up = chosen.size() > before;
  }
  outcome.blockers = std::move(chosen);
  return outcome;
}

// ---------------------------------------------------------------------------
// Public algorithms

namespace detail {

template <class Select>
BlockerResult timed(Algorithm algo, const Instance& inst, std::size_t budget, const SelectionOptions& opt,
                    std::uint64_t samples, Select&& select) {
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  BlockerResult r;
  r.algorithm = algo;
  r.budget = budget;
  r.samples = samples;
  r.master_seed = opt.master_seed;
  const auto start = std::chrono::steady_clock::now();
  select(r);
  r.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  r.residual = evaluate_spread(inst, r.blockers, opt);
  return r;
}

}  // namespace detail

inline BlockerResult baseline_greedy(const Instance& inst, std::size_t budget, const SelectionOptions& opt) {
  return detail::timed(Algorithm::BaselineGreedy, inst, budget, opt, opt.rounds, [&](BlockerResult& r) {
    r.blockers = baseline_greedy_with(inst, budget, McsSpread{opt.rounds, opt.master_seed, opt.threads},
                                      0.0, &opt);
  });
}

inline BlockerResult advanced_greedy(const Instance& inst, std::size_t budget, const SelectionOptions& opt) {
  return detail::timed(Algorithm::AdvancedGreedy, inst, budget, opt, opt.theta, [&](BlockerResult& r) {
    r.blockers = advanced_greedy_with(
        inst, budget, SampledDecrease{opt.theta, opt.master_seed, opt.threads}, 0.0, &opt);
  });
}

inline BlockerResult greedy_replace(const Instance& inst, std::size_t budget, const SelectionOptions& opt) {
  return detail::timed(Algorithm::GreedyReplace, inst, budget, opt, opt.theta, [&](BlockerResult& r) {
    auto outcome = greedy_replace_with(
        inst, budget, SampledDecrease{opt.theta, opt.master_seed, opt.threads}, 0.0, &opt);
    r.blockers = std::move(outcome.blockers);
    if (outcome.topped_up) r.deviations.emplace_back("topped_up_beyond_out_neighbours");
  });
}

/// Uniform sample of `budget` distinct candidates.
inline BlockerResult rand_blockers(const Instance& inst, std::size_t budget, const SelectionOptions& opt) {
  return detail::timed(Algorithm::Rand, inst, budget, opt, 0, [&](BlockerResult& r) {
    const auto pool = inst.candidates();
    std::mt19937_64 rng(derive_stream(opt.master_seed, streams::kRandomBlockers));
    std::vector<VertexId> picked;
    picked.reserve(std::min(budget, pool.size()));
    // Selection sampling keeps the output deterministic for a given engine state.
    std::size_t needed = std::min(budget, pool.size());
    for (std::size_t i = 0; i < pool.size() && needed > 0; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - i - 1);
      if (pick(rng) < needed) {
        picked.push_back(pool[i]);
        --needed;
      }
    }
    r.blockers = std::move(picked);
  });
}

/// The `budget` candidates of largest out-degree, ties to the smaller id.
inline BlockerResult outdegree_blockers(const Instance& inst, std::size_t budget,
                                        const SelectionOptions& opt = {}) {
  return detail::timed(Algorithm::OutDegree, inst, budget, opt, 0, [&](BlockerResult& r) {
    auto pool = inst.candidates();
    const std::size_t k = std::min(budget, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(),
                      [&](VertexId a, VertexId b) {
                        const auto da = inst.graph.out_degree(a), db = inst.graph.out_degree(b);
                        return da != db ? da > db : a < b;
                      });
    pool.resize(k);
    r.blockers = std::move(pool);
  });
}

struct ExactLimits {
  std::size_t max_vertices = 40;
  std::size_t max_budget = 4;
};

/// Optimal blocker set by enumerating every `budget`-subset of the candidates.
/// Spreads come from the exact oracle when it is feasible on G, else from MCS
/// with `opt.rounds`. Ties go to the lexicographically smallest set.
inline BlockerResult exact_blockers(const Instance& inst, std::size_t budget, const SelectionOptions& opt,
                                    ExactLimits limits = {}) {
  const auto pool = inst.candidates();
  const std::size_t k = std::min(budget, pool.size());
  if (k < pool.size() && (inst.graph.num_vertices() > limits.max_vertices || budget > limits.max_budget))
    throw GuardError("exact search exceeds its guard (n <= " + std::to_string(limits.max_vertices) +
                     ", b <= " + std::to_string(limits.max_budget) + ")");
  const bool exact = oracle_feasible(inst.graph, inst.root);
  return detail::timed(Algorithm::Exact, inst, budget, opt, exact ? 0 : opt.rounds, [&](BlockerResult& r) {
    if (!exact) r.deviations.emplace_back("mcs_fallback");
    VertexSet blocked(inst.graph.num_vertices());
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    std::vector<VertexId> best_set;
    std::uint64_t call = 0;
    while (true) {
      detail::check_deadline(opt);
      for (std::size_t i : idx) blocked.insert(pool[i]);
      const double value =
          exact ? exact_spread(inst.graph, inst.root, blocked).estimate.value
                : mcs_spread(inst.graph, inst.root, blocked, opt.rounds,
                             derive_stream(opt.master_seed, call++), opt.threads)
                      .value;
      for (std::size_t i : idx) blocked.erase(pool[i]);
      if (value < best - 1e-12) {
        best = value;
        best_set.clear();
        for (std::size_t i : idx) best_set.push_back(pool[i]);
      }
      // Next combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    r.blockers = std::move(best_set);
  });
}

inline BlockerResult select_blockers(Algorithm algo, const Instance& inst, std::size_t budget,
                                     const SelectionOptions& opt) {
  switch (algo) {
    case Algorithm::BaselineGreedy: return baseline_greedy(inst, budget, opt);
    case Algorithm::AdvancedGreedy: return advanced_greedy(inst, budget, opt);
    case Algorithm::GreedyReplace: return greedy_replace(inst, budget, opt);
    case Algorithm::Rand: return rand_blockers(inst, budget, opt);
    case Algorithm::OutDegree: return outdegree_blockers(inst, budget, opt);
    case Algorithm::Exact: return exact_blockers(inst, budget, opt);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace imin
