#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "imin/experiment.hpp"

using namespace imin;

namespace {

ExperimentConfig toy_config() {
  ExperimentConfig cfg;
  cfg.dataset = "data/toy.txt";
  cfg.directed = true;
  cfg.model = ProbModel::explicit_probs();
  cfg.seeds = {1};
  cfg.budgets = {1, 2};
  cfg.algorithms = {Algorithm::AdvancedGreedy, Algorithm::GreedyReplace, Algorithm::Exact};
  cfg.theta = 20000;
  cfg.rounds = 5000;
  cfg.eval_rounds = 5000;
  cfg.repetitions = 1;
  cfg.master_seed = 3;
  cfg.threads = 1;
  cfg.record_timing = false;
  return cfg;
}

std::string csv_of(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_csv(out, run_minimize(cfg, imin::testing::toy_graph()));
  return out.str();
}

}  // namespace

TEST(Minimize, ToyTable) {
  const auto csv = csv_of(toy_config());
  EXPECT_EQ(csv,
            "dataset,model,algorithm,budget,repetition,spread,stderr,duration_ms,blockers\n"
            "toy.txt,explicit,ag,1,0,3,0,,5\n"
            "toy.txt,explicit,ag,1,mean,3,0,,\n"
            "toy.txt,explicit,ag,2,0,2,0,,5;2\n"
            "toy.txt,explicit,ag,2,mean,2,0,,\n"
            "toy.txt,explicit,gr,1,0,3,0,,5\n"
            "toy.txt,explicit,gr,1,mean,3,0,,\n"
            "toy.txt,explicit,gr,2,0,1,0,,2;4\n"
            "toy.txt,explicit,gr,2,mean,1,0,,\n"
            "toy.txt,explicit,exact,1,0,3,0,,5\n"
            "toy.txt,explicit,exact,1,mean,3,0,,\n"
            "toy.txt,explicit,exact,2,0,1,0,,2;4\n"
            "toy.txt,explicit,exact,2,mean,1,0,,\n");
}

TEST(Minimize, RepetitionsAndMeans) {
  auto cfg = toy_config();
  cfg.algorithms = {Algorithm::Rand};
  cfg.budgets = {2};
  cfg.repetitions = 5;
  cfg.record_timing = true;
  const auto report = run_minimize(cfg, imin::testing::toy_graph());
  ASSERT_EQ(report.rows.size(), 6u);
  double spread = 0, dur = 0;
  for (int i = 0; i < 5; ++i) {
    ASSERT_EQ(report.rows[i].repetition, std::size_t(i));
    spread += report.rows[i].spread;
    dur += report.rows[i].duration_ms;
  }
  EXPECT_FALSE(report.rows[5].repetition.has_value());
  EXPECT_NEAR(report.rows[5].spread, spread / 5, 1e-12);
  EXPECT_NEAR(report.rows[5].duration_ms, dur / 5, 1e-12);
  EXPECT_EQ(report.records.size(), 5u);
  EXPECT_TRUE(report.records[0].contains("duration_ms"));
}

TEST(Minimize, RandomSeedsAreReproducible) {
  auto cfg = toy_config();
  cfg.seeds.clear();
  cfg.random_seeds = 2;
  cfg.algorithms = {Algorithm::AdvancedGreedy, Algorithm::Rand};
  cfg.repetitions = 3;
  EXPECT_EQ(csv_of(cfg), csv_of(cfg));
  cfg.redraw_seeds = true;
  EXPECT_EQ(csv_of(cfg), csv_of(cfg));
}

TEST(Minimize, ThreadCountDoesNotChangeOutput) {
  auto cfg = toy_config();
  cfg.algorithms = {Algorithm::BaselineGreedy, Algorithm::AdvancedGreedy, Algorithm::GreedyReplace};
  const auto one = csv_of(cfg);
  cfg.threads = 4;
  EXPECT_EQ(csv_of(cfg), one);
}

TEST(Minimize, GuardedExactRowIsSkipped) {
  auto cfg = toy_config();
  cfg.algorithms = {Algorithm::Exact};
  cfg.budgets = {5};
  const auto report = run_minimize(cfg, imin::testing::toy_graph());
  EXPECT_EQ(report.rows[0].status, RunStatus::Skipped);
  std::ostringstream out;
  write_csv(out, report);
  EXPECT_NE(out.str().find("exact,5,0,skipped,,,"), std::string::npos) << out.str();
  EXPECT_EQ(report.records[0]["status"], "skipped");
}

TEST(Minimize, JsonRecordFields) {
  const auto report = run_minimize(toy_config(), imin::testing::toy_graph());
  const auto& rec = report.records[0];
  for (const char* key : {"algorithm", "seeds", "budget", "blockers", "residual_spread", "stderr", "theta",
                          "master_seed", "deviations", "status"})
    EXPECT_TRUE(rec.contains(key)) << key;
  EXPECT_EQ(rec["seeds"], nlohmann::json::array({1}));
  EXPECT_FALSE(rec.contains("duration_ms"));
}

TEST(Minimize, ConfigValidation) {
  auto cfg = toy_config();
  cfg.algorithms.clear();
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = toy_config();
  cfg.budgets = {0};
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = toy_config();
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = toy_config();
  cfg.seeds = {42};
  EXPECT_THROW(run_minimize(cfg, imin::testing::toy_graph()), DataError);
}
