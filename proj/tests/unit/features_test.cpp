#include <gtest/gtest.h>

#include "support.hpp"

using namespace keygraph;
using oracle::make_graph;

namespace {

RankConfig tight() {
  RankConfig c;
  c.tolerance = 1e-12;
  c.max_iterations = 100000;
  return c;
}

void expect_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "node " << i;
}

WeightedGraph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
WeightedGraph path3() { return make_graph(3, {{0, 1}, {1, 2}}); }

// Hub 0 joined to neighbours 1..6, plus the given edges among the neighbours.
WeightedGraph hub(const std::vector<oracle::EdgeSpec>& neighbour_edges) {
  std::vector<oracle::EdgeSpec> edges;
  for (std::size_t v = 1; v <= 6; ++v) edges.push_back({0, v});
  edges.insert(edges.end(), neighbour_edges.begin(), neighbour_edges.end());
  return make_graph(7, edges);
}

}  // namespace

TEST(Strength, SumsIncidentWeights) {
  EXPECT_EQ(strength(make_graph(2, {{0, 1, 3}})), (std::vector<double>{3, 3}));
  EXPECT_EQ(strength(triangle()), (std::vector<double>{2, 2, 2}));
}

TEST(Eigenvector, SingleEdge) {
  const auto r = eigenvector_centrality(make_graph(2, {{0, 1}}));
  EXPECT_TRUE(r.converged);
  expect_near(r.scores, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-9);
}

TEST(Eigenvector, StarCentreToLeafRatioIsRootThree) {
  const auto r = eigenvector_centrality(make_graph(4, {{0, 1}, {0, 2}, {0, 3}}), tight());
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.scores[0] / r.scores[1], std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(r.scores[1], r.scores[3], 1e-12);
}

TEST(Eigenvector, RegularGraphIsUniform) {
  const auto cycle = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  const auto r = eigenvector_centrality(cycle);
  for (double v : r.scores) EXPECT_NEAR(v, 1 / std::sqrt(5.0), 1e-12);
}

TEST(Eigenvector, NonConvergenceIsFlagged) {
  RankConfig c;
  c.max_iterations = 1;
  c.tolerance = 1e-15;
  const auto r = eigenvector_centrality(path3(), c);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  double norm = 0;
  for (double v : r.scores) norm += v * v;
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(Eigenvector, UnitNormAfterEveryStep) {
  Rng rng(2);
  const auto g = oracle::random_connected_graph(rng, 9, 0.3);
  for (int steps = 1; steps < 30; ++steps) {
    RankConfig c;
    c.max_iterations = steps;
    const auto r = eigenvector_centrality(g, c);
    double norm = 0;
    for (double v : r.scores) norm += v * v;
    EXPECT_NEAR(norm, 1.0, 1e-12);
  }
}

TEST(PageRank, FixedPointOfOneOnEdgeAndTriangle) {
  expect_near(pagerank(make_graph(2, {{0, 1}})).scores, {1, 1}, 1e-12);
  expect_near(pagerank(triangle()).scores, {1, 1, 1}, 1e-12);
}

TEST(PageRank, PathMatchesLinearSolve) {
  const auto r = pagerank(path3(), tight());
  EXPECT_TRUE(r.converged);
  expect_near(r.scores, oracle::pagerank(path3(), 0.85), 1e-8);
}

TEST(PositionRank, SymmetricPositionsGiveEqualScores) {
  const std::vector<std::vector<std::size_t>> pos = {{1, 5}, {1, 5}};
  const auto r = position_rank(make_graph(2, {{0, 1}}), pos);
  EXPECT_NEAR(r.scores[0], r.scores[1], 1e-12);
}

TEST(PositionRank, EarlierWordScoresHigher) {
  const std::vector<std::vector<std::size_t>> pos = {{1}, {100}};
  const auto r = position_rank(make_graph(2, {{0, 1}}), pos);
  EXPECT_GT(r.scores[0], r.scores[1]);
}

TEST(PositionRank, PathMatchesLinearSolve) {
  const std::vector<std::vector<std::size_t>> pos = {{1}, {2}, {3}};
  const auto r = position_rank(path3(), pos, tight());
  expect_near(r.scores, oracle::position_rank(path3(), pos, 0.85), 1e-8);
}

TEST(PositionRank, BiasIsNormalizedInverseSum) {
  const std::vector<std::vector<std::size_t>> pos = {{1, 2}, {4}};
  const auto b = position_bias(pos);
  EXPECT_NEAR(b[0], 1.5 / 1.75, 1e-15);
  EXPECT_NEAR(b[1], 0.25 / 1.75, 1e-15);
  EXPECT_THROW(position_rank(path3(), pos), ConfigError);
}

TEST(Ranks, ConvergedResultsAreFixedPoints) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 3 + rng.index(10), 0.3);
    const auto pr = pagerank(g);
    ASSERT_TRUE(pr.converged);
    // one further application from the result barely moves it
    std::vector<double> s = strength(g), y(g.node_count());
    detail::normalized_spread(g, s, pr.scores, y);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(0.15 + 0.85 * y[i], pr.scores[i], 1e-5);
  }
}

TEST(Ranks, RejectBadConfig) {
  RankConfig c;
  c.damping = 1.0;
  EXPECT_THROW(pagerank(path3(), c), ConfigError);
  c = {};
  c.tolerance = 0;
  EXPECT_THROW(eigenvector_centrality(path3(), c), ConfigError);
  c = {};
  c.alpha = 0;
  EXPECT_THROW(position_rank(path3(), std::vector<std::vector<std::size_t>>{{1}, {2}, {3}}, c), ConfigError);
}

TEST(Coreness, SmallCases) {
  EXPECT_EQ(coreness(triangle()), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(coreness(path3()), (std::vector<int>{1, 1, 1}));
  // K4 with a pendant
  const auto g = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 4}});
  EXPECT_EQ(coreness(g), (std::vector<int>{3, 3, 3, 3, 1}));
}

TEST(Coreness, IgnoresWeights) {
  EXPECT_EQ(coreness(make_graph(3, {{0, 1, 5}, {1, 2, 7}})), (std::vector<int>{1, 1, 1}));
}

TEST(Coreness, MatchesBruteForceOnRandomGraphs) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_graph(rng, 1 + rng.index(12), rng.uniform());
    EXPECT_EQ(coreness(g), oracle::coreness(g));
  }
}

TEST(Coreness, AddingAnEdgeNeverLowersCoreness) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(12);
    auto g = oracle::random_graph(rng, n, 0.3);
    const auto before = coreness(g);
    const std::size_t a = rng.index(n), b = rng.index(n);
    g.add_edge(a, b);
    const auto after = coreness(g);
    for (std::size_t v = 0; v < n; ++v) EXPECT_GE(after[v], before[v]);
  }
}

TEST(Clustering, FigureThreeHubs) {
  // three unrelated contexts glued by the hub: only the pair edges
  const auto unrelated = hub({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_DOUBLE_EQ(clustering_coefficient(unrelated)[0], 3.0 / 15.0);
  EXPECT_DOUBLE_EQ(clustering_coefficient(unrelated)[0], 0.20);
  // related contexts: five more edges across the pairs
  const auto related = hub({{1, 2}, {3, 4}, {5, 6}, {2, 3}, {4, 5}, {1, 6}, {1, 3}, {2, 4}});
  EXPECT_DOUBLE_EQ(clustering_coefficient(related)[0], 8.0 / 15.0);
  EXPECT_NEAR(clustering_coefficient(related)[0], 0.53, 0.005);
}

TEST(Clustering, CliqueTreeAndBounds) {
  const auto k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  for (double v : clustering_coefficient(k4)) EXPECT_EQ(v, 1.0);
  for (double v : clustering_coefficient(make_graph(4, {{0, 1}, {0, 2}, {2, 3}}))) EXPECT_EQ(v, 0.0);
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_graph(rng, 1 + rng.index(14), rng.uniform());
    const auto cc = clustering_coefficient(g);
    expect_near(cc, oracle::clustering(g), 1e-12);
    for (double v : cc) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(RandomOracles, RanksMatchLinearAlgebra) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(14);
    const auto g = oracle::random_connected_graph(rng, n, rng.uniform() * 0.5);
    std::vector<std::vector<std::size_t>> pos(n);
    for (auto& p : pos) {
      std::set<std::size_t> s;
      const std::size_t k = 1 + rng.index(4);
      while (s.size() < k) s.insert(1 + rng.index(200));
      p.assign(s.begin(), s.end());
    }
    expect_near(pagerank(g, tight()).scores, oracle::pagerank(g, 0.85), 1e-6);
    expect_near(position_rank(g, pos, tight()).scores, oracle::position_rank(g, pos, 0.85), 1e-6);
    expect_near(eigenvector_centrality(g, tight()).scores, oracle::eigenvector(g), 1e-6);
  }
}

TEST(Normalize, MinMaxAndConstantRange) {
  std::vector<double> v = {2, 4, 6};
  min_max_normalize(v);
  EXPECT_EQ(v, (std::vector<double>{0, 0.5, 1}));
  std::vector<double> c = {3, 3, 3};
  min_max_normalize(c);
  EXPECT_EQ(c, (std::vector<double>{0, 0, 0}));
  std::vector<double> noisy = {1.0, 1.0 + 1e-16 * 2, 1.0 - 1e-16};
  min_max_normalize(noisy);
  EXPECT_EQ(noisy, (std::vector<double>{0, 0, 0}));
}

TEST(FeatureRecords, NormalizedWithinDocument) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.index(12);
    TextGraph tg;
    tg.graph = oracle::random_connected_graph(rng, n, 0.3);
    for (std::size_t i = 0; i < n; ++i) {
      tg.words.push_back("w" + std::to_string(i));
      tg.positions.push_back({1 + rng.index(50)});
    }
    const auto recs = build_feature_records(tg);
    ASSERT_EQ(recs.size(), n);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      double lo = 1, hi = 0;
      for (const auto& r : recs) {
        EXPECT_GE(r.normalized[f], 0.0);
        EXPECT_LE(r.normalized[f], 1.0);
        lo = std::min(lo, r.normalized[f]);
        hi = std::max(hi, r.normalized[f]);
      }
      EXPECT_EQ(lo, 0.0);
      EXPECT_TRUE(hi == 1.0 || hi == 0.0);
    }
  }
}

TEST(FeatureRecords, ConstantCorenessNormalizesToZero) {
  TextGraph tg;
  tg.graph = triangle();
  tg.words = {"a", "b", "c"};
  tg.positions = {{1}, {2}, {3}};
  const auto recs = build_feature_records(tg);
  for (const auto& r : recs) {
    EXPECT_EQ(r.raw[Feature::coreness], 2);
    EXPECT_EQ(r.normalized[Feature::coreness], 0);
    EXPECT_EQ(r.normalized[Feature::pagerank], 0);
  }
}

TEST(FeatureRecords, SingleNodeWarnsAndZeroes) {
  TextGraph tg;
  tg.graph = WeightedGraph(1);
  tg.words = {"solo"};
  tg.positions = {{1}};
  int warnings = 0;
  log::ScopedSink sink([&](std::string_view) { ++warnings; });
  const auto recs = build_feature_records(tg);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].normalized, FeatureVector{});
  EXPECT_GE(warnings, 1);
}
