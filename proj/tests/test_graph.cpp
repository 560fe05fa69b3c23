#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "imin/graph.hpp"
#include "imin/spread.hpp"

using namespace imin;
using imin::testing::v;

namespace {

ProbGraph load(const std::string& text, bool directed) {
  std::istringstream in(text);
  return load_edge_list(in, directed);
}

}  // namespace

TEST(LoadEdgeList, DirectedPath) {
  const auto g = load("0 1\n1 2\n", true);
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_TRUE(g.directed());
  EXPECT_FALSE(g.has_probabilities());
}

TEST(LoadEdgeList, UndirectedDoublesEdges) {
  const auto g = load("0 1\n", false);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.out_targets(0)[0], 1u);
  EXPECT_EQ(g.out_targets(1)[0], 0u);
}

TEST(LoadEdgeList, RemapsIdsAndDropsSelfLoops) {
  const auto g = load("5 9\n9 5\n5 5\n", true);
  EXPECT_EQ(g.num_vertices(), 2u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.external_id(0), 5u);
  EXPECT_EQ(g.external_id(1), 9u);
  EXPECT_EQ(g.find_external(9), VertexId{1});
  EXPECT_FALSE(g.find_external(7).has_value());
  EXPECT_EQ(load("1 2\n3 3\n", true).num_vertices(), 2u);
}

TEST(LoadEdgeList, CommentsAndBlankLines) {
  const auto g = load("# SNAP header\n\n  3 4 \n# more\n4 7\n", true);
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(LoadEdgeList, MalformedLineReportsLineNumber) {
  try {
    load("0 1\n1 x\n", true);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load("0 1 2 3\n", true), DataError);
  EXPECT_THROW(load("0 1 1.5\n", true), DataError);
  EXPECT_THROW(load("-1 2\n", true), DataError);
  EXPECT_THROW(load("0 1 0.5\n1 2\n", true), DataError);
}

TEST(LoadEdgeList, EmptyFileIsAnError) {
  EXPECT_THROW(load("", true), DataError);
  EXPECT_THROW(load("# only comments\n", true), DataError);
  EXPECT_THROW(load_edge_list(std::string("/nonexistent/file.txt"), true), DataError);
}

TEST(LoadEdgeList, ParallelEdgesMergeByNoisyOr) {
  const auto g = load("0 1 0.5\n0 1 0.5\n", true);
  ASSERT_EQ(g.num_edges(), 1u);
  EXPECT_DOUBLE_EQ(g.prob(0), 0.75);
  EXPECT_EQ(g.in_degree(1), 1u);
}

TEST(LoadEdgeList, InDegreeMatchesStoredEdges) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = imin::testing::random_prob_graph(rng, 12, 40);
    std::vector<std::size_t> in(g.num_vertices(), 0);
    for (const auto& e : g.edges()) ++in[e.target];
    for (VertexId u = 0; u < g.num_vertices(); ++u) EXPECT_EQ(g.in_degree(u), in[u]);
  }
}

TEST(Canonical, RoundTripIsIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    // Sparse external ids, with and without probabilities, both directions.
    std::ostringstream text;
    std::uniform_int_distribution<int> id(0, 40);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      text << id(rng) * 1000 + 7 << ' ' << id(rng) * 1000 + 7;
      if (trial % 2 == 0) text << ' ' << p(rng);
      text << '\n';
    }
    const auto g = load(text.str(), trial % 3 == 0);
    std::ostringstream dump;
    write_canonical(dump, g);
    const auto again = load(dump.str(), false);
    EXPECT_EQ(g, again);
    std::ostringstream dump2;
    write_canonical(dump2, again);
    EXPECT_EQ(dump.str(), dump2.str());
  }
}

TEST(Canonical, HeaderAndLineFormat) {
  const auto g = load("2 1 0.1\n1 2 0.25\n", true);
  std::ostringstream out;
  write_canonical(out, g);
  EXPECT_EQ(out.str(),
            "# canonical 2 2 directed\n"
            "1 2 0.25\n"
            "2 1 0.10000000000000001\n");
}

TEST(AssignProbs, WeightedCascade) {
  const auto g = assign_probs(load("0 4\n1 4\n2 4\n3 4\n4 0\n", true), ProbModel::weighted_cascade(), 0);
  for (const auto& e : g.edges()) {
    if (e.target == 4) EXPECT_DOUBLE_EQ(e.prob, 0.25);
    else EXPECT_DOUBLE_EQ(e.prob, 1.0);
  }
}

TEST(AssignProbs, TrivalencyDeterministicAndInRange) {
  std::mt19937_64 rng(5);
  const auto base = imin::testing::random_prob_graph(rng, 30, 200);
  const auto a = assign_probs(base, ProbModel::trivalency(), 42);
  const auto b = assign_probs(base, ProbModel::trivalency(), 42);
  const auto c = assign_probs(base, ProbModel::trivalency(), 43);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  int counts[3] = {0, 0, 0};
  for (std::size_t e = 0; e < a.num_edges(); ++e) {
    const double p = a.prob(e);
    const int k = p == 0.1 ? 0 : p == 0.01 ? 1 : p == 0.001 ? 2 : -1;
    ASSERT_GE(k, 0) << p;
    ++counts[k];
  }
  for (int k : counts) EXPECT_GT(k, 40);
}

TEST(AssignProbs, TrivalencyFixedOverride) {
  const auto g = assign_probs(load("0 1\n1 2\n", true), ProbModel::uniform(0.3), 1);
  for (const auto& e : g.edges()) EXPECT_EQ(e.prob, 0.3);
}

TEST(AssignProbs, ExplicitCopiesProbabilities) {
  const auto raw = load("0 1 0.125\n1 2 0.75\n", true);
  const auto g = assign_probs(raw, ProbModel::explicit_probs(), 9);
  EXPECT_EQ(g.prob(0), 0.125);
  EXPECT_EQ(g.prob(1), 0.75);
  EXPECT_THROW(assign_probs(load("0 1\n", true), ProbModel::explicit_probs(), 0), DataError);
}

TEST(UnifySeeds, SingleSeedIsIdentity) {
  const auto g = imin::testing::toy_graph();
  const auto inst = single_seed(g, v(1));
  EXPECT_EQ(inst.root, v(1));
  EXPECT_EQ(inst.graph, g);
  EXPECT_EQ(inst.spread_offset(), 0.0);
}

TEST(UnifySeeds, MergesSeedOutEdges) {
  const auto g = ProbGraph::from_edges(3, {{0, 2, 0.5}, {1, 2, 0.5}});
  const VertexId seeds[] = {0, 1};
  const auto inst = unify_seeds(g, seeds);
  EXPECT_EQ(inst.root, 3u);
  ASSERT_EQ(inst.graph.out_degree(inst.root), 1u);
  EXPECT_EQ(inst.graph.out_targets(inst.root)[0], 2u);
  EXPECT_DOUBLE_EQ(inst.graph.out_probs(inst.root)[0], 0.75);
  EXPECT_EQ(inst.graph.out_degree(0), 0u);
  EXPECT_EQ(inst.graph.out_degree(1), 0u);
  EXPECT_EQ(inst.spread_offset(), 1.0);
  EXPECT_TRUE(inst.is_excluded(0));
  EXPECT_TRUE(inst.is_excluded(3));
  EXPECT_EQ(inst.candidates(), std::vector<VertexId>{2});
}

TEST(UnifySeeds, EdgeBetweenSeedsIsDropped) {
  const auto g = ProbGraph::from_edges(4, {{0, 1, 0.4}, {1, 2, 0.3}, {2, 0, 0.9}, {2, 3, 0.5}});
  const VertexId seeds[] = {0, 1};
  const auto inst = unify_seeds(g, seeds);
  for (const auto& e : inst.graph.edges()) {
    EXPECT_FALSE(e.source == 0 || e.source == 1) << e.source;
    EXPECT_FALSE(e.target == 0 || e.target == 1) << e.target;
  }
  const auto multi = exact_spread(g, std::span<const VertexId>(seeds), {}).estimate.value;
  const auto unified = exact_spread(inst.graph, inst.root).estimate.value;
  EXPECT_NEAR(unified + inst.spread_offset(), multi, 1e-12);
}

TEST(UnifySeeds, Errors) {
  const auto g = imin::testing::toy_graph();
  EXPECT_THROW(unify_seeds(g, std::vector<VertexId>{}), DataError);
  EXPECT_THROW(unify_seeds(g, std::vector<VertexId>{99}), DataError);
  EXPECT_THROW(unify_seeds(g, std::vector<VertexId>{1, 1}), DataError);
}

TEST(UnifySeeds, SpreadInvarianceOnRandomGraphs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = imin::testing::random_graph(rng, {9, 18, 10, 1.0});
    std::vector<VertexId> seeds{0, 1};
    if (trial % 2) seeds.push_back(2);
    const auto multi = exact_spread(g, std::span<const VertexId>(seeds), {}).estimate.value;
    const auto inst = unify_seeds(g, seeds);
    const auto unified = exact_spread(inst.graph, inst.root).estimate.value;
    EXPECT_NEAR(unified + inst.spread_offset(), multi, 1e-12);
  }
}
