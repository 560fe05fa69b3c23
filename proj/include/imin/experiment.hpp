#pragma once

// Batch experiment runner behind the `minimize` command: every (algorithm,
// budget, repetition) cell is one selection run followed by a residual-spread
// evaluation, reported as CSV rows plus per-cell mean rows and JSON records.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imin/blockers.hpp"
#include "imin/graph.hpp"
#include "imin/rng.hpp"

namespace imin {

inline const char* model_name(const ProbModel& m) {
  switch (m.kind) {
    case ProbModel::Kind::Trivalency: return "tr";
    case ProbModel::Kind::WeightedCascade: return "wc";
    case ProbModel::Kind::Explicit: return "explicit";
  }
  return "?";
}

struct ExperimentConfig {
  std::string dataset;
  bool directed = false;
  ProbModel model = ProbModel::weighted_cascade();
  std::vector<std::uint64_t> seeds;  // external ids; used when random_seeds == 0
  std::size_t random_seeds = 0;
  bool redraw_seeds = false;          // draw random seeds anew for every repetition
  std::vector<std::size_t> budgets{20, 40, 60, 80, 100};
  std::vector<Algorithm> algorithms{Algorithm::AdvancedGreedy, Algorithm::GreedyReplace};
  std::uint64_t theta = 10000;
  std::uint64_t rounds = 10000;
  std::uint64_t eval_rounds = 100000;
  std::size_t repetitions = 5;
  std::uint64_t master_seed = 0;
  std::size_t threads = 0;
  double timeout_secs = 86400.0;
  bool record_timing = true;

  void validate() const {
    if (algorithms.empty()) throw DataError("no algorithms selected");
    if (budgets.empty()) throw DataError("no budgets given");
    for (auto b : budgets)
      if (b == 0) throw DataError("budgets must be at least 1");
    if (repetitions == 0) throw DataError("repetitions must be at least 1");
    if (theta == 0 || rounds == 0 || eval_rounds == 0) throw DataError("sample counts must be positive");
    if (seeds.empty() && random_seeds == 0) throw DataError("no seeds given");
  }
};

enum class RunStatus { Ok, Skipped, Timeout };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Skipped: return "skipped";
    case RunStatus::Timeout: return "timeout";
  }
  return "?";
}

struct MinimizeRow {
  Algorithm algorithm;
  std::size_t budget;
  std::optional<std::size_t> repetition;  // nullopt for the mean row
  RunStatus status = RunStatus::Ok;
  double spread = 0.0;
  double std_error = 0.0;
  double duration_ms = 0.0;
  std::vector<std::uint64_t> blockers = {};  // external ids
};

struct MinimizeReport {
  std::string dataset;
  std::string model;
  bool record_timing = true;
  std::vector<MinimizeRow> rows;
  nlohmann::json records = nlohmann::json::array();
};

/// `k` distinct vertices drawn uniformly, ascending.
inline std::vector<VertexId> draw_random_seeds(const ProbGraph& g, std::size_t k, std::uint64_t key) {
  if (k == 0 || k > g.num_vertices()) throw DataError("cannot draw " + std::to_string(k) + " seeds");
  std::mt19937_64 rng(key);
  std::vector<VertexId> out;
  std::size_t needed = k;
  const std::size_t n = g.num_vertices();
  for (std::size_t i = 0; i < n && needed > 0; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, n - i - 1);
    if (pick(rng) < needed) {
      out.push_back(static_cast<VertexId>(i));
      --needed;
    }
  }
  return out;
}

inline std::vector<VertexId> resolve_seeds(const ProbGraph& g, std::span<const std::uint64_t> external) {
  std::vector<VertexId> out;
  for (auto id : external) {
    auto v = g.find_external(id);
    if (!v) throw DataError("seed " + std::to_string(id) + " is not a vertex of the graph");
    out.push_back(*v);
  }
  return out;
}

inline std::vector<std::uint64_t> to_external(const ProbGraph& g, std::span<const VertexId> vs) {
  std::vector<std::uint64_t> out;
  out.reserve(vs.size());
  for (VertexId v : vs) out.push_back(g.external_id(v));
  return out;
}

/// Runs every cell of the experiment on `graph` (probabilities assigned).
inline MinimizeReport run_minimize(const ExperimentConfig& cfg, const ProbGraph& graph) {
  cfg.validate();
  MinimizeReport report;
  report.dataset = std::filesystem::path(cfg.dataset).filename().string();
  report.model = model_name(cfg.model);
  report.record_timing = cfg.record_timing;

  auto seeds_for = [&](std::size_t rep) {
    if (cfg.random_seeds == 0) return resolve_seeds(graph, cfg.seeds);
    auto key = derive_stream(cfg.master_seed, streams::kSeedSelection);
    if (cfg.redraw_seeds) key = derive_stream(key, rep);
    return draw_random_seeds(graph, cfg.random_seeds, key);
  };

  std::optional<Instance> shared;
  if (!cfg.redraw_seeds) shared = unify_seeds(graph, seeds_for(0));

  for (Algorithm algo : cfg.algorithms) {
    for (std::size_t budget : cfg.budgets) {
      std::vector<MinimizeRow> cell;
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const Instance inst = shared ? *shared : unify_seeds(graph, seeds_for(rep));
        SelectionOptions opt;
        opt.theta = cfg.theta;
        opt.rounds = cfg.rounds;
        opt.eval_rounds = cfg.eval_rounds;
        opt.threads = cfg.threads;
        opt.master_seed = derive_stream(derive_stream(cfg.master_seed, streams::kRepetition), rep);
        opt.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(cfg.timeout_secs));

        MinimizeRow row{algo, budget, rep};
        nlohmann::json rec = {{"algorithm", to_string(algo)},
                              {"seeds", to_external(graph, inst.seeds)},
                              {"budget", budget},
                              {"repetition", rep},
                              {"master_seed", opt.master_seed}};
        try {
          const BlockerResult res = select_blockers(algo, inst, budget, opt);
          row.spread = res.residual.value;
          row.std_error = res.residual.std_error;
          row.duration_ms = res.duration_ms;
          row.blockers = to_external(inst.graph, res.blockers);
          rec["blockers"] = row.blockers;
          rec["residual_spread"] = row.spread;
          rec["stderr"] = row.std_error;
          rec["spread_method"] = to_string(res.residual.method);
          rec[algo == Algorithm::BaselineGreedy || algo == Algorithm::Exact ? "rounds" : "theta"] =
              res.samples;
          rec["deviations"] = res.deviations;
        } catch (const GuardError& e) {
          row.status = RunStatus::Skipped;
          rec["reason"] = e.what();
        } catch (const TimeoutError& e) {
          row.status = RunStatus::Timeout;
          rec["reason"] = e.what();
        }
        rec["status"] = to_string(row.status);
        if (cfg.record_timing && row.status == RunStatus::Ok) rec["duration_ms"] = row.duration_ms;
        report.records.push_back(std::move(rec));
        cell.push_back(std::move(row));
      }

      MinimizeRow mean{algo, budget, std::nullopt};
      std::size_t ok = 0;
      for (const auto& r : cell) {
        if (r.status != RunStatus::Ok) continue;
        mean.spread += r.spread;
        mean.std_error += r.std_error;
        mean.duration_ms += r.duration_ms;
        ++ok;
      }
      if (ok == 0) {
        mean.status = cell.front().status;
      } else {
        mean.spread /= static_cast<double>(ok);
        mean.std_error /= static_cast<double>(ok);
        mean.duration_ms /= static_cast<double>(ok);
      }
      for (auto& r : cell) report.rows.push_back(std::move(r));
      report.rows.push_back(std::move(mean));
    }
  }
  return report;
}

inline constexpr const char* kCsvHeader =
    "dataset,model,algorithm,budget,repetition,spread,stderr,duration_ms,blockers";

/// One header row, then one row per run and a "mean" row per (algorithm,
/// budget). Non-completed runs carry their status in the spread column. With
/// timing disabled the duration column is left empty so output is reproducible.
inline void write_csv(std::ostream& out, const MinimizeReport& report) {
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << report.dataset << ',' << report.model << ',' << to_string(r.algorithm) << ',' << r.budget << ','
        << (r.repetition ? std::to_string(*r.repetition) : std::string("mean")) << ',';
    if (r.status != RunStatus::Ok) {
      out << to_string(r.status) << ",,,\n";
      continue;
    }
    out << num(r.spread) << ',' << num(r.std_error) << ',';
    if (report.record_timing) out << num(r.duration_ms);
    out << ',';
    for (std::size_t i = 0; i < r.blockers.size(); ++i) out << (i ? ";" : "") << r.blockers[i];
    out << '\n';
  }
}

}  // namespace imin
