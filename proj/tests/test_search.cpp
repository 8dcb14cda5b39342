#include <gtest/gtest.h>

#include <random>

#include "navcell/search.hpp"
#include "oracles.hpp"

using namespace navcell;
using namespace oracle;

TEST(ModulatedWeight, Examples) {
  EXPECT_EQ(modulated_weight(1.0, 0.0, 3.0), 1.0);
  EXPECT_NEAR(modulated_weight(2.0, 1.0, 3.0), 0.0995741367357279, 1e-15);
  EXPECT_EQ(modulated_weight(1.0, 0.5, 0.0), 1.0);
}

TEST(ModulatedWeight, PositiveAndContinuous) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(1e-6, 10.0), s(0.0, 1.0), b(0.0, 10.0);
  for (int i = 0; i < 100000; ++i) {
    const double dd = d(rng), ss = s(rng), bb = b(rng);
    const double w = modulated_weight(dd, ss, bb);
    EXPECT_GT(w, 0.0);
    const double h = 1e-9;
    EXPECT_LE(std::abs(modulated_weight(dd, std::min(1.0, ss + h), bb) - w), dd * bb * h * 1.01 + 1e-300);
  }
}

TEST(Yen, SameCellIsSingleCorridor) {
  const Adjacency adj{{{1, 0}}, {{0, 0}}};
  const std::vector<double> w{1.0};
  const auto c = yen_k_shortest(adj, w, 0, 0, 5);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].cells, std::vector<int>{0});
  EXPECT_EQ(c[0].cost, 0.0);
}

TEST(Yen, DiamondReturnsBothPathsLexicographically) {
  const Adjacency adj{{{1, 0}, {2, 1}}, {{0, 0}, {3, 2}}, {{0, 1}, {3, 3}}, {{1, 2}, {2, 3}}};
  const std::vector<double> w{1, 1, 1, 1};
  const auto c = yen_k_shortest(adj, w, 0, 3, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].cells, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(c[1].cells, (std::vector<int>{0, 2, 3}));
}

TEST(Yen, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 11;
    const auto g = random_graph(rng, n, 0.45);
    const int s = 0, t = n - 1;
    const auto all = brute_force(g, s, t);
    const int k = 1 + trial % 6;
    if (all.empty()) {
      EXPECT_THROW(yen_k_shortest(g.adj, g.weight, s, t, k), Error);
      continue;
    }
    const auto got = yen_k_shortest(g.adj, g.weight, s, t, k);
    ASSERT_EQ(got.size(), std::min<std::size_t>(k, all.size())) << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].cost, all[i].cost) << trial;
      EXPECT_EQ(got[i].cells, all[i].cells) << trial;
    }
  }
}

TEST(Yen, FilterRemovesPortals) {
  const Adjacency adj{{{1, 0}, {2, 1}}, {{0, 0}, {3, 2}}, {{0, 1}, {3, 3}}, {{1, 2}, {2, 3}}};
  const std::vector<double> w{1, 1, 1, 1};
  YenOptions opt;
  opt.allowed = {1, 0, 1, 1};
  const auto c = yen_k_shortest(adj, w, 0, 3, 4, opt);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].cells, (std::vector<int>{0, 1, 3}));
  opt.allowed = {0, 0, 1, 1};
  try {
    yen_k_shortest(adj, w, 0, 3, 4, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCorridor);
  }
}

TEST(Plan, SameCellIsStraightSegment) {
  const auto tri = triangulate(Rect2{{0, 0}, {1, 1}}, {});
  const Point2 qs{0.6, 0.1}, qg{0.9, 0.3};
  const auto g = build_graph(tri, qs, qg);
  ASSERT_EQ(g.start_cell, g.goal_cell);
  const auto r = plan(g, {}, {});
  EXPECT_EQ(r.path.waypoints.size(), 2u);
  EXPECT_EQ(r.cost, distance(qs, qg));
}

TEST(Plan, SealedGoalIsNoSolution) {
  const auto tri = triangulate(Rect2{{0, 0}, {1, 1}}, {rect(0.0, 0.45, 1.0, 0.55)});
  const auto g = build_graph(tri, {0.5, 0.1}, {0.5, 0.9});
  try {
    plan(g, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSolution);
  }
}

TEST(Plan, RandomMapsSatisfyConvergenceProperties) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto obs = random_rects(rng, 10 + trial % 20);
    const auto tri = triangulate(Rect2{{0, 0}, {1, 1}}, obs);
    const auto frees = tri.free_triangles();
    const Point2 qs = tri.centroid(frees[rng() % frees.size()]);
    const Point2 qg = tri.centroid(frees[rng() % frees.size()]);
    const auto g = build_graph(tri, qs, qg);
    const auto r = plan(g, {}, {.k = 4});
    EXPECT_GE(r.cost, distance(qs, qg) - 1e-12);
    EXPECT_TRUE(r.budget_exhausted);
    EXPECT_FALSE(r.timed_out);
    ASSERT_FALSE(r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      EXPECT_LT(r.trace[i].cost, r.trace[i - 1].cost);
      EXPECT_GE(r.trace[i].time_ms, r.trace[i - 1].time_ms);
    }
    for (std::size_t i = 1; i < r.iteration_cost.size(); ++i) EXPECT_LE(r.iteration_cost[i], r.iteration_cost[i - 1]);
    std::set<std::vector<int>> unique(r.evaluated.begin(), r.evaluated.end());
    EXPECT_EQ(unique.size(), r.evaluated.size());
    EXPECT_EQ(static_cast<int>(r.evaluated.size()), r.phase1.evaluated + r.phase2.evaluated);
    EXPECT_EQ(r.cost, r.path.length);
    // Every portal on the winning corridor passes the final ellipse filter.
    const auto sums = portal_ellipse_sums(g);
    for (std::size_t i = 0; i + 1 < r.path.cells.size(); ++i)
      EXPECT_LE(sums[g.portal_between(r.path.cells[i], r.path.cells[i + 1])], r.cost + 1e-9);
  }
}

TEST(Plan, ZeroBetaMatchesUnguided) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto obs = random_rects(rng, 20);
    const auto tri = triangulate(Rect2{{0, 0}, {1, 1}}, obs);
    const auto g = build_graph(tri, {0.01, 0.01}, {0.99, 0.99});
    std::vector<double> scores(g.num_portals());
    for (double& s : scores) s = u(rng);
    const auto a = plan(g, {}, {.k = 8, .beta = 3.0});
    const auto b = plan(g, scores, {.k = 8, .beta = 0.0});
    EXPECT_EQ(a.evaluated, b.evaluated);
    EXPECT_EQ(a.path.waypoints, b.path.waypoints);
    EXPECT_EQ(a.cost, b.cost);
    const auto guided = plan(g, scores, {.k = 8, .beta = 3.0});
    EXPECT_GE(guided.cost, distance(g.qs, g.qg));
  }
}

TEST(Plan, ThreeDimensionalCorridor) {
  const Aabb3 unit{{0, 0, 0}, {1, 1, 1}};
  const std::vector<Aabb3> obs{{{0.45, 0.0, 0.0}, {0.55, 1.0, 0.45}}, {{0.45, 0.0, 0.55}, {0.55, 1.0, 1.0}}};
  const auto d = slab_decompose(unit, obs);
  const auto g = build_graph(d, {0.1, 0.5, 0.1}, {0.9, 0.5, 0.9});
  const auto r = plan(g, {}, {.k = 4});
  EXPECT_GE(r.cost, distance(g.qs, g.qg));
  EXPECT_TRUE(r.budget_exhausted);
  for (const auto& p : r.path.waypoints)
    if (p.x > 0.45 && p.x < 0.55) EXPECT_TRUE(p.z >= 0.45 && p.z <= 0.55);
}
