// Command-line front end: convert, assign-probs, spread, delta, minimize.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 guard or timeout.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imin/imin.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kGuard = 3 };

struct GraphArgs {
  std::string input;
  bool directed = false;
  std::string model = "auto";
  std::uint64_t master_seed = 0;
};

void add_graph_args(CLI::App* cmd, GraphArgs& a, bool with_model = true) {
  cmd->add_option("input", a.input, "Edge list ('u v' or 'u v p' per line)")->required();
  cmd->add_flag("--directed", a.directed, "Treat the edge list as directed");
  if (with_model)
    cmd->add_option("--model", a.model, "Probability model")
        ->check(CLI::IsMember({"auto", "tr", "wc", "explicit"}));
  cmd->add_option("--master-seed", a.master_seed, "Master RNG seed");
}

imin::ProbModel parse_model(const std::string& name, const imin::ProbGraph& g) {
  if (name == "tr") return imin::ProbModel::trivalency();
  if (name == "wc") return imin::ProbModel::weighted_cascade();
  if (name == "explicit") return imin::ProbModel::explicit_probs();
  return g.has_probabilities() ? imin::ProbModel::explicit_probs() : imin::ProbModel::weighted_cascade();
}

imin::ProbGraph load_with_probs(const GraphArgs& a, imin::ProbModel* used = nullptr) {
  const auto raw = imin::load_edge_list(a.input, a.directed);
  const auto model = parse_model(a.model, raw);
  if (used) *used = model;
  return imin::assign_probs(raw, model, a.master_seed);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw imin::DataError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence minimization by vertex blocking under the independent cascade model"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; keys of a command go in its [section]");

  // convert
  GraphArgs convert_args;
  std::string convert_out;
  auto* convert = app.add_subcommand("convert", "Rewrite an edge list in canonical form");
  add_graph_args(convert, convert_args, false);
  convert->add_option("--out", convert_out, "Output file (default stdout)");

  // assign-probs
  GraphArgs assign_args;
  std::string assign_out;
  auto* assign = app.add_subcommand("assign-probs", "Assign edge probabilities and dump the graph");
  add_graph_args(assign, assign_args);
  assign->add_option("--out", assign_out, "Output file (default stdout)");

  // spread
  GraphArgs spread_args;
  std::vector<std::uint64_t> spread_seeds, spread_blockers;
  std::string spread_method = "mcs";
  std::uint64_t spread_rounds = 100000;
  std::size_t spread_threads = 0;
  auto* spread = app.add_subcommand("spread", "Expected spread of a seed set with optional blockers");
  add_graph_args(spread, spread_args);
  spread->add_option("--seeds", spread_seeds, "Seed vertex ids")->delimiter(',')->required();
  spread->add_option("--blockers", spread_blockers, "Blocked vertex ids")->delimiter(',');
  spread->add_option("--method", spread_method)->check(CLI::IsMember({"mcs", "exact"}));
  spread->add_option("--rounds", spread_rounds, "Monte-Carlo rounds")->check(CLI::PositiveNumber);
  spread->add_option("--threads", spread_threads, "Worker threads (0 = all)");

  // delta
  GraphArgs delta_args;
  std::vector<std::uint64_t> delta_seeds;
  std::uint64_t delta_theta = 10000;
  std::size_t delta_threads = 0;
  bool delta_exact = false;
  std::string delta_out;
  auto* delta = app.add_subcommand("delta", "Spread decrease of blocking each vertex, ranked");
  add_graph_args(delta, delta_args);
  delta->add_option("--seeds", delta_seeds, "Seed vertex ids")->delimiter(',')->required();
  delta->add_option("--theta", delta_theta, "Sampled graphs")->check(CLI::PositiveNumber);
  delta->add_option("--threads", delta_threads, "Worker threads (0 = all)");
  delta->add_flag("--exact", delta_exact, "Enumerate all live-edge worlds instead of sampling");
  delta->add_option("--out", delta_out, "Output file (default stdout)");

  // minimize
  GraphArgs min_args;
  imin::ExperimentConfig cfg;
  std::vector<std::string> algo_names{"ag", "gr"};
  std::string csv_out, json_out;
  bool no_timing = false;
  auto* minimize = app.add_subcommand("minimize", "Select blockers and report residual spread");
  add_graph_args(minimize, min_args);
  auto* seeds_opt = minimize->add_option("--seeds", cfg.seeds, "Seed vertex ids")->delimiter(',');
  minimize->add_option("--random-seeds", cfg.random_seeds, "Draw this many random seeds")
      ->excludes(seeds_opt);
  minimize->add_flag("--redraw-seeds", cfg.redraw_seeds, "Draw random seeds anew per repetition");
  minimize->add_option("--budget", cfg.budgets, "Budgets")->delimiter(',');
  minimize->add_option("--algo", algo_names, "Algorithms: bg,ag,gr,rand,outdeg,exact")
      ->delimiter(',')
      ->check(CLI::IsMember({"bg", "ag", "gr", "rand", "outdeg", "exact"}));
  minimize->add_option("--theta", cfg.theta, "Sampled graphs per decrease computation")
      ->check(CLI::PositiveNumber);
  minimize->add_option("--rounds", cfg.rounds, "MCS rounds inside selection")->check(CLI::PositiveNumber);
  minimize->add_option("--eval-rounds", cfg.eval_rounds, "MCS rounds for the final spread")
      ->check(CLI::PositiveNumber);
  minimize->add_option("--reps", cfg.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
  minimize->add_option("--threads", cfg.threads, "Worker threads (0 = all)");
  minimize->add_option("--timeout-secs", cfg.timeout_secs, "Per-run time limit")->check(CLI::PositiveNumber);
  minimize->add_option("--out", csv_out, "CSV output (default stdout)");
  minimize->add_option("--json", json_out, "JSON records output");
  minimize->add_flag("--no-timing", no_timing, "Leave durations out for reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*convert) {
      const auto g = imin::load_edge_list(convert_args.input, convert_args.directed);
      Output out(convert_out);
      imin::write_canonical(out.stream(), g);
    } else if (*assign) {
      const auto g = load_with_probs(assign_args);
      Output out(assign_out);
      imin::write_canonical(out.stream(), g);
    } else if (*spread) {
      const auto g = load_with_probs(spread_args);
      const auto seeds = imin::resolve_seeds(g, spread_seeds);
      const auto inst = imin::unify_seeds(g, seeds);
      const auto blocked_ids = imin::resolve_seeds(g, spread_blockers);
      imin::VertexSet blocked(inst.graph.num_vertices(), blocked_ids);
      for (auto s : seeds)
        if (blocked.contains(s)) throw imin::DataError("a seed cannot be blocked");
      imin::SpreadEstimate est =
          spread_method == "exact"
              ? imin::exact_spread(inst.graph, inst.root, blocked).estimate
              : imin::mcs_spread(inst.graph, inst.root, blocked, spread_rounds,
                                 imin::derive_stream(spread_args.master_seed, imin::streams::kEvaluation),
                                 spread_threads);
      std::printf("%.10g %.10g\n", est.value + inst.spread_offset(), est.std_error);
    } else if (*delta) {
      const auto g = load_with_probs(delta_args);
      const auto inst = imin::unify_seeds(g, imin::resolve_seeds(g, delta_seeds));
      const auto d = delta_exact
                         ? imin::exact_decrease(inst.graph, inst.root)
                         : imin::decrease_es(inst.graph, inst.root, delta_theta, delta_args.master_seed, {},
                                             delta_threads);
      std::vector<imin::VertexId> order;
      for (imin::VertexId v = 0; v < inst.graph.num_vertices(); ++v)
        if (!inst.is_excluded(v)) order.push_back(v);
      std::stable_sort(order.begin(), order.end(),
                       [&](auto a, auto b) { return d.delta[a] > d.delta[b]; });
      Output out(delta_out);
      out.stream() << "vertex,delta\n";
      for (auto v : order) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", d.delta[v]);
        out.stream() << inst.graph.external_id(v) << ',' << buf << '\n';
      }
    } else if (*minimize) {
      cfg.dataset = min_args.input;
      cfg.directed = min_args.directed;
      cfg.master_seed = min_args.master_seed;
      cfg.record_timing = !no_timing;
      cfg.algorithms.clear();
      for (const auto& a : algo_names) cfg.algorithms.push_back(*imin::parse_algorithm(a));
      cfg.validate();
      const auto g = load_with_probs(min_args, &cfg.model);
      const auto report = imin::run_minimize(cfg, g);
      Output out(csv_out);
      imin::write_csv(out.stream(), report);
      if (!json_out.empty()) {
        Output js(json_out);
        js.stream() << report.records.dump(2) << '\n';
      }
    }
  } catch (const imin::GuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGuard;
  } catch (const imin::TimeoutError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGuard;
  } catch (const imin::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
