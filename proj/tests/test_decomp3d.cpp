#include <gtest/gtest.h>

#include <bit>
#include <numeric>
#include <random>
#include <set>

#include "navcell/decomp3d.hpp"
#include "oracles.hpp"

using namespace navcell;
using namespace oracle;

namespace {

Aabb3 box(double x0, double y0, double z0, double x1, double y1, double z1) { return {{x0, y0, z0}, {x1, y1, z1}}; }

const Aabb3 kUnit = box(0, 0, 0, 1, 1, 1);

// Pairs of cells whose closed boxes meet in a rectangle of positive area.
std::set<std::pair<int, int>> brute_portals(const std::vector<Aabb3>& cells) {
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(cells.size()); ++j) {
      int touching = 0, positive = 0;
      for (std::size_t a = 0; a < 3; ++a) {
        const double lo = std::max(cells[i].min[a], cells[j].min[a]);
        const double hi = std::min(cells[i].max[a], cells[j].max[a]);
        if (hi > lo) ++positive;
        else if (hi == lo) ++touching;
      }
      if (touching == 1 && positive == 2) out.insert({i, j});
    }
  return out;
}

std::vector<int> components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = find(i);
  return out;
}

int containing_cell(const SlabDecomposition& d, const Point3& p) {
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    if (d.cells[i].interior_contains(p, 0.0)) return i;
  return -1;
}

}  // namespace

TEST(SlabDecompose, NoObstaclesIsOneCell) {
  const auto d = slab_decompose(kUnit, {});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.cells[0].min, kUnit.min);
  EXPECT_EQ(d.cells[0].max, kUnit.max);
  EXPECT_TRUE(extract_portals(d).empty());
}

TEST(SlabDecompose, CenteredBoxGridAndMerge) {
  const std::vector<Aabb3> obs{box(0.4, 0.4, 0.4, 0.6, 0.6, 0.6)};
  const auto raw = slab_decompose(kUnit, obs, {.merge = false});
  EXPECT_EQ(raw.size(), 26u);
  EXPECT_NEAR(raw.free_volume(), 1.0 - 0.008, 1e-12);
  const auto merged = slab_decompose(kUnit, obs);
  EXPECT_LE(merged.size(), 26u);
  EXPECT_NEAR(merged.free_volume(), 1.0 - 0.008, 1e-12);

  const auto portals = extract_portals(raw);
  const auto brute = brute_portals(raw.cells);
  ASSERT_EQ(portals.size(), brute.size());
  for (const auto& p : portals) EXPECT_TRUE(brute.count({p.a, p.b}));
}

TEST(SlabDecompose, AllBlockedThrows) {
  try {
    slab_decompose(kUnit, {box(-1, -1, -1, 2, 2, 2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyFreeSpace);
  }
}

TEST(ExtractPortals, SharedFullFace) {
  SlabDecomposition d;
  d.bounds = box(0, 0, 0, 2, 1, 1);
  d.planes = {{{0, 1, 2}, {0, 1}, {0, 1}}};
  d.grid_cells = {{{0, 0, 0}, {1, 1, 1}}, {{1, 0, 0}, {2, 1, 1}}};
  d.cells = {box(0, 0, 0, 1, 1, 1), box(1, 0, 0, 2, 1, 1)};
  const auto p = extract_portals(d);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].face.area(), 1.0);
  EXPECT_EQ(p[0].face.center(), (Point3{1.0, 0.5, 0.5}));
  EXPECT_EQ(p[0].face.normal_axis, 0);
}

TEST(ExtractPortals, EdgeContactIsNotAPortal) {
  SlabDecomposition d;
  d.bounds = box(0, 0, 0, 2, 2, 1);
  d.planes = {{{0, 1, 2}, {0, 1, 2}, {0, 1}}};
  d.grid_cells = {{{0, 0, 0}, {1, 1, 1}}, {{1, 1, 0}, {2, 2, 1}}};
  d.cells = {box(0, 0, 0, 1, 1, 1), box(1, 1, 0, 2, 2, 1)};
  EXPECT_TRUE(extract_portals(d).empty());
}

TEST(SlabDecompose, RandomMapsConserveVolumeAndAvoidObstacles) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    const auto obs = random_boxes(rng, 1 + trial % 8);
    SlabDecomposition d;
    try {
      d = slab_decompose(kUnit, obs);
    } catch (const Error&) {
      continue;
    }
    const double obstacle_volume = union_volume(clipped(obs, kUnit));
    EXPECT_NEAR(d.free_volume() + obstacle_volume, 1.0, 1e-9);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_TRUE(d.cells[i].valid());
      for (const auto& o : obs) EXPECT_EQ(overlap_volume(d.cells[i], o), 0.0);
      for (std::size_t j = i + 1; j < d.size(); ++j) EXPECT_EQ(overlap_volume(d.cells[i], d.cells[j]), 0.0);
    }

    const auto portals = extract_portals(d);
    const auto brute = brute_portals(d.cells);
    ASSERT_EQ(portals.size(), brute.size());
    for (const auto& p : portals) {
      EXPECT_TRUE(brute.count({p.a, p.b}));
      EXPECT_GT(p.face.area(), 0.0);
    }
  }
}

TEST(SlabDecompose, SegmentsInsideCellsStayFree) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto obs = random_boxes(rng, 6);
  const auto d = slab_decompose(kUnit, obs);
  for (const auto& c : d.cells)
    for (int s = 0; s < 20; ++s) {
      Point3 a, b;
      for (std::size_t k = 0; k < 3; ++k) {
        a[k] = c.min[k] + u(rng) * c.extent(k);
        b[k] = c.min[k] + u(rng) * c.extent(k);
      }
      for (int t = 0; t <= 50; ++t) {
        const Point3 p = a + (b - a) * (t / 50.0);
        for (const auto& o : obs) EXPECT_FALSE(o.interior_contains(p, 0.0));
      }
    }
}

TEST(SlabDecompose, PortalConnectivityMatchesUnmergedGrid) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto obs = random_boxes(rng, 4 + trial % 6);
    SlabDecomposition raw, merged;
    try {
      raw = slab_decompose(kUnit, obs, {.merge = false});
      merged = slab_decompose(kUnit, obs);
    } catch (const Error&) {
      continue;
    }
    std::vector<std::pair<int, int>> raw_edges;
    for (auto [a, b] : brute_portals(raw.cells)) raw_edges.push_back({a, b});
    std::vector<std::pair<int, int>> merged_edges;
    for (const auto& p : extract_portals(merged)) merged_edges.push_back({p.a, p.b});
    const auto rc = components(static_cast<int>(raw.size()), raw_edges);
    const auto mc = components(static_cast<int>(merged.size()), merged_edges);
    std::vector<int> owner(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      owner[i] = containing_cell(merged, raw.cells[i].center());
      ASSERT_GE(owner[i], 0);
    }
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (std::size_t j = i + 1; j < raw.size(); ++j)
        EXPECT_EQ(rc[i] == rc[j], mc[owner[i]] == mc[owner[j]]);
  }
}

TEST(Oracles, UnionVolumeMethodsAgree) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto obs = random_boxes(rng, 1 + trial % 9);
    EXPECT_NEAR(union_volume(obs), union_volume_grid(obs), 1e-12);
  }
}
