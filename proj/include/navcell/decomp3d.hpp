#pragma once

// Slab decomposition of a box workspace with axis-aligned box obstacles.
// Obstacle faces induce a rectilinear grid; obstacle cells are dropped and the
// remaining free cells are merged greedily into larger boxes.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "navcell/error.hpp"
#include "navcell/geom.hpp"

namespace navcell {

struct Map3 {
  Aabb3 bounds;
  std::vector<Aabb3> obstacles;
};

/// Cell extents as half-open index ranges into the splitting planes.
struct GridBox {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  friend bool operator==(const GridBox&, const GridBox&) = default;
};

struct SlabDecomposition {
  Aabb3 bounds;
  std::vector<Aabb3> cells;
  std::vector<GridBox> grid_cells;
  std::array<std::vector<double>, 3> planes;
  std::vector<Aabb3> obstacles;  // clipped to bounds

  std::size_t size() const { return cells.size(); }

  double free_volume() const {
    double v = 0.0;
    for (const auto& c : cells) v += c.volume();
    return v;
  }
};

struct SlabOptions {
  bool merge = true;
};

/// Shared rectangular face between two cells.
struct FacePortal {
  int a = -1;
  int b = -1;
  FaceRect3 face;
};

namespace detail {

inline std::vector<double> dedup_planes(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol::kSnap) out.push_back(x);
  return out;
}

inline int plane_index(const std::vector<double>& planes, double x) {
  auto it = std::lower_bound(planes.begin(), planes.end(), x - tol::kSnap);
  return static_cast<int>(it - planes.begin());
}

/// One greedy pass merging boxes that are adjacent along `axis` and share the
/// full cross-section. Returns true if anything merged.
inline bool merge_along(std::vector<GridBox>& boxes, int axis) {
  const int u = (axis + 1) % 3, w = (axis + 2) % 3;
  auto key = [&](const GridBox& b) { return std::make_tuple(b.lo[u], b.hi[u], b.lo[w], b.hi[w], b.lo[axis]); };
  std::sort(boxes.begin(), boxes.end(), [&](const GridBox& x, const GridBox& y) { return key(x) < key(y); });
  std::vector<GridBox> out;
  out.reserve(boxes.size());
  bool merged = false;
  for (const GridBox& b : boxes) {
    if (!out.empty()) {
      GridBox& last = out.back();
      if (last.lo[u] == b.lo[u] && last.hi[u] == b.hi[u] && last.lo[w] == b.lo[w] && last.hi[w] == b.hi[w] &&
          last.hi[axis] == b.lo[axis]) {
        last.hi[axis] = b.hi[axis];
        merged = true;
        continue;
      }
    }
    out.push_back(b);
  }
  boxes = std::move(out);
  return merged;
}

}  // namespace detail

/// Slab convex decomposition. Overlapping obstacles are allowed (union semantics).
inline SlabDecomposition slab_decompose(const Aabb3& bounds, const std::vector<Aabb3>& obstacles,
                                        SlabOptions options = {}) {
  if (!bounds.valid() || !is_finite(bounds.min) || !is_finite(bounds.max))
    throw Error(ErrorCode::InvalidInput, "workspace bounds are empty");
  SlabDecomposition d;
  d.bounds = bounds;
  for (const Aabb3& o : obstacles) {
    if (!is_finite(o.min) || !is_finite(o.max)) throw Error(ErrorCode::InvalidInput, "non-finite obstacle");
    Aabb3 c;
    for (std::size_t i = 0; i < 3; ++i) {
      c.min[i] = std::max(o.min[i], bounds.min[i]);
      c.max[i] = std::min(o.max[i], bounds.max[i]);
    }
    if (c.valid()) d.obstacles.push_back(c);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<double> coords{bounds.min[a], bounds.max[a]};
    for (const Aabb3& o : d.obstacles) {
      coords.push_back(o.min[a]);
      coords.push_back(o.max[a]);
    }
    d.planes[a] = detail::dedup_planes(std::move(coords));
    // Pin the outermost planes to the exact bounds.
    d.planes[a].front() = bounds.min[a];
    d.planes[a].back() = bounds.max[a];
  }
  const int nx = static_cast<int>(d.planes[0].size()) - 1;
  const int ny = static_cast<int>(d.planes[1].size()) - 1;
  const int nz = static_cast<int>(d.planes[2].size()) - 1;

  // Occupied x-intervals per (y, z) row.
  std::vector<std::vector<std::pair<int, int>>> rows(static_cast<std::size_t>(ny) * nz);
  for (const Aabb3& o : d.obstacles) {
    GridBox g;
    for (int a = 0; a < 3; ++a) {
      g.lo[a] = detail::plane_index(d.planes[a], o.min[a]);
      g.hi[a] = detail::plane_index(d.planes[a], o.max[a]);
    }
    if (g.lo[0] >= g.hi[0]) continue;
    for (int k = g.lo[2]; k < g.hi[2]; ++k)
      for (int j = g.lo[1]; j < g.hi[1]; ++j)
        rows[static_cast<std::size_t>(k) * ny + j].push_back({g.lo[0], g.hi[0]});
  }

  std::vector<GridBox> boxes;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      auto& occ = rows[static_cast<std::size_t>(k) * ny + j];
      std::sort(occ.begin(), occ.end());
      int cursor = 0;
      auto emit = [&](int from, int to) {
        if (from >= to) return;
        if (options.merge) {
          boxes.push_back({{from, j, k}, {to, j + 1, k + 1}});
        } else {
          for (int i = from; i < to; ++i) boxes.push_back({{i, j, k}, {i + 1, j + 1, k + 1}});
        }
      };
      for (auto [lo, hi] : occ) {
        emit(cursor, lo);
        cursor = std::max(cursor, hi);
      }
      emit(cursor, nx);
      occ.clear();
      occ.shrink_to_fit();
    }
  if (boxes.empty()) throw Error(ErrorCode::EmptyFreeSpace, "obstacles cover the whole workspace");

  if (options.merge) {
    // x runs are already maximal; continue y, z, x, ... until nothing merges.
    int stale = 0;
    for (int axis = 1; stale < 3; axis = (axis + 1) % 3) stale = detail::merge_along(boxes, axis) ? 0 : stale + 1;
  }
  std::sort(boxes.begin(), boxes.end(), [](const GridBox& a, const GridBox& b) {
    return std::tie(a.lo[2], a.lo[1], a.lo[0], a.hi[2], a.hi[1], a.hi[0]) <
           std::tie(b.lo[2], b.lo[1], b.lo[0], b.hi[2], b.hi[1], b.hi[0]);
  });
  d.grid_cells = std::move(boxes);
  d.cells.reserve(d.grid_cells.size());
  for (const GridBox& g : d.grid_cells) {
    Aabb3 c;
    for (int a = 0; a < 3; ++a) {
      c.min[a] = d.planes[a][g.lo[a]];
      c.max[a] = d.planes[a][g.hi[a]];
    }
    d.cells.push_back(c);
  }
  return d;
}

inline SlabDecomposition slab_decompose(const Map3& map, SlabOptions options = {}) {
  return slab_decompose(map.bounds, map.obstacles, options);
}

/// Portals between every pair of cells sharing a rectangle of positive area.
inline std::vector<FacePortal> extract_portals(const SlabDecomposition& d) {
  std::vector<FacePortal> out;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, w = (axis + 2) % 3;
    const double face_area = d.bounds.extent(u) * d.bounds.extent(w);
    std::map<int, std::vector<int>> ending, starting;
    for (int c = 0; c < static_cast<int>(d.grid_cells.size()); ++c) {
      ending[d.grid_cells[c].hi[axis]].push_back(c);
      starting[d.grid_cells[c].lo[axis]].push_back(c);
    }
    for (const auto& [plane, lows] : ending) {
      auto it = starting.find(plane);
      if (it == starting.end()) continue;
      for (int a : lows)
        for (int b : it->second) {
          const GridBox& ga = d.grid_cells[a];
          const GridBox& gb = d.grid_cells[b];
          const int u0 = std::max(ga.lo[u], gb.lo[u]), u1 = std::min(ga.hi[u], gb.hi[u]);
          const int w0 = std::max(ga.lo[w], gb.lo[w]), w1 = std::min(ga.hi[w], gb.hi[w]);
          if (u0 >= u1 || w0 >= w1) continue;
          FacePortal p;
          p.a = std::min(a, b);
          p.b = std::max(a, b);
          p.face.normal_axis = axis;
          p.face.box.min[axis] = p.face.box.max[axis] = d.planes[axis][plane];
          p.face.box.min[u] = d.planes[u][u0];
          p.face.box.max[u] = d.planes[u][u1];
          p.face.box.min[w] = d.planes[w][w0];
          p.face.box.max[w] = d.planes[w][w1];
          if (p.face.area() < tol::kDegenerateAreaFraction * face_area) continue;
          out.push_back(p);
        }
    }
  }
  std::sort(out.begin(), out.end(), [](const FacePortal& x, const FacePortal& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

}  // namespace navcell
