#pragma once

// Parametric map generators, dynamic sequences and dense post-validation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/decomp2d.hpp"
#include "navcell/decomp3d.hpp"
#include "navcell/error.hpp"
#include "navcell/eval.hpp"

namespace navcell {

struct ScenarioSpec {
  std::string family = "forest";
  std::uint64_t seed = 0;
  /// Negative values select the family default.
  int obstacles = -1;
  double door_width = -1.0;
  int clutter = -1;
  int size = -1;
  std::vector<double> start;
  std::vector<double> goal;
};

struct Scenario {
  std::string family;
  std::uint64_t seed = 0;
  int dim = 2;
  Map2 map2;
  Map3 map3;
  std::vector<double> start;
  std::vector<double> goal;
  /// Width of the narrowest intended passage.
  double door_width = 0.0;
  bool solvable = true;

  Point2 start2() const { return {start[0], start[1]}; }
  Point2 goal2() const { return {goal[0], goal[1]}; }
  Point3 start3() const { return {start[0], start[1], start[2]}; }
  Point3 goal3() const { return {goal[0], goal[1], goal[2]}; }
};

inline const std::vector<std::string>& scenario_families() {
  static const std::vector<std::string> names{"forest",      "labyrinth", "bottleneck2d", "multi_room", "dense2d",
                                              "bn_office3d", "bn_maze3d", "bn_layers3d",  "dense3d"};
  return names;
}

inline int family_dimension(const std::string& family) {
  const auto& f = scenario_families();
  const auto it = std::find(f.begin(), f.end(), family);
  if (it == f.end()) throw Error(ErrorCode::InvalidSpec, "unknown scenario family " + family);
  return it - f.begin() < 5 ? 2 : 3;
}

namespace detail {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

inline SimplePolygon box2(double x0, double y0, double x1, double y1) {
  return SimplePolygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

inline SimplePolygon octagon(Point2 c, double radius, double phase) {
  SimplePolygon p;
  for (int i = 0; i < 8; ++i) {
    const double a = phase + i * std::numbers::pi / 4.0;
    p.vertices.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a)});
  }
  return p;
}

struct Disc {
  Point2 c;
  double r;
};

inline double rect_distance(Point2 p, const Rect2& r) {
  const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
  const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
  return std::hypot(dx, dy);
}

/// Rejection-samples separated discs inside `region`, clear of `blockers` and `keepout` points.
inline std::vector<Disc> place_discs(Rng& rng, int count, double rmin, double rmax, const Rect2& region,
                                     const std::vector<Rect2>& blockers, const std::vector<Point2>& keepout,
                                     double gap, double keepout_radius) {
  std::vector<Disc> out;
  const long attempts = 2000L + 400L * count;
  for (long i = 0; i < attempts && static_cast<int>(out.size()) < count; ++i) {
    const double r = uniform(rng, rmin, rmax);
    if (region.width() <= 2 * (r + gap) || region.height() <= 2 * (r + gap)) continue;
    const Point2 c{uniform(rng, region.min.x + r + gap, region.max.x - r - gap),
                   uniform(rng, region.min.y + r + gap, region.max.y - r - gap)};
    bool ok = true;
    for (const Disc& d : out) ok = ok && distance(c, d.c) > r + d.r + gap;
    for (const Rect2& b : blockers) ok = ok && rect_distance(c, b) > r + gap;
    for (const Point2& k : keepout) ok = ok && distance(c, k) > r + keepout_radius;
    if (ok) out.push_back({c, r});
  }
  if (static_cast<int>(out.size()) < count)
    throw Error(ErrorCode::InvalidSpec, "cannot place " + std::to_string(count) + " obstacles");
  return out;
}

inline void add_discs(Map2& m, Rng& rng, const std::vector<Disc>& discs) {
  for (const Disc& d : discs) m.obstacles.push_back(octagon(d.c, d.r, uniform(rng, 0.0, std::numbers::pi / 4.0)));
}

inline int pick(int value, int fallback) { return value >= 0 ? value : fallback; }

inline double pick_width(const ScenarioSpec& s, Rng& rng, double lo, double hi) {
  const double w = s.door_width > 0.0 ? s.door_width : uniform(rng, lo, hi);
  return w;
}

/// Spanning tree over an n-dimensional grid by randomized depth-first search; returns carved (cell, neighbor) pairs.
inline std::vector<std::pair<int, int>> carve_maze(Rng& rng, const std::vector<int>& dims) {
  int total = 1;
  for (int d : dims) total *= d;
  auto coords = [&](int id) {
    std::vector<int> c(dims.size());
    for (std::size_t a = 0; a < dims.size(); ++a) {
      c[a] = id % dims[a];
      id /= dims[a];
    }
    return c;
  };
  auto index = [&](const std::vector<int>& c) {
    int id = 0;
    for (std::size_t a = dims.size(); a-- > 0;) id = id * dims[a] + c[a];
    return id;
  };
  std::vector<char> seen(total, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::vector<std::pair<int, int>> carved;
  while (!stack.empty()) {
    const int cur = stack.back();
    const auto c = coords(cur);
    std::vector<int> options;
    for (std::size_t a = 0; a < dims.size(); ++a)
      for (int s : {-1, 1}) {
        auto n = c;
        n[a] += s;
        if (n[a] < 0 || n[a] >= dims[a]) continue;
        const int id = index(n);
        if (!seen[id]) options.push_back(id);
      }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    const int next = options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
    seen[next] = 1;
    carved.push_back({std::min(cur, next), std::max(cur, next)});
    stack.push_back(next);
  }
  std::sort(carved.begin(), carved.end());
  return carved;
}

inline Map2 forest(Rng& rng, int count, double rmin, double rmax, const std::vector<Point2>& keepout) {
  Map2 m{{{0, 0}, {1, 1}}, {}};
  add_discs(m, rng, place_discs(rng, count, rmin, rmax, m.bounds, {}, keepout, 0.004, 0.02));
  return m;
}

inline Map2 labyrinth(Rng& rng, int n) {
  // Alternating corridor / wall bands; the workspace boundary closes the outer ring.
  const double wall = 0.25 / n;
  const double lane = (1.0 - (n - 1) * wall) / n;
  std::vector<double> edges{0.0};
  for (int i = 0; i < 2 * n - 1; ++i) edges.push_back(edges.back() + (i % 2 == 0 ? lane : wall));
  edges.back() = 1.0;
  const auto carved = carve_maze(rng, {n, n});
  auto open = [&](int a, int b) { return std::binary_search(carved.begin(), carved.end(), std::pair{std::min(a, b), std::max(a, b)}); };
  const int blocks = 2 * n - 1;
  auto solid = [&](int bx, int by) {
    if (bx % 2 == 0 && by % 2 == 0) return false;
    if (bx % 2 == 1 && by % 2 == 1) return true;
    if (bx % 2 == 1) return !open(by / 2 * n + bx / 2, by / 2 * n + bx / 2 + 1);
    return !open(by / 2 * n + bx / 2, (by / 2 + 1) * n + bx / 2);
  };
  Map2 m{{{0, 0}, {1, 1}}, {}};
  for (int by = 0; by < blocks; ++by)
    for (int bx = 0; bx < blocks;) {
      if (!solid(bx, by)) {
        ++bx;
        continue;
      }
      int end = bx;
      while (end + 1 < blocks && solid(end + 1, by)) ++end;
      m.obstacles.push_back(box2(edges[bx], edges[by], edges[end + 1], edges[by + 1]));
      bx = end + 1;
    }
  return m;
}

inline Map2 bottleneck2d(Rng& rng, double gap, int clutter, const std::vector<Point2>& keepout) {
  Map2 m{{{0, 0}, {1, 1}}, {}};
  const double x0 = 0.49, x1 = 0.51;
  const double y0 = uniform(rng, 0.2, 0.8 - gap);
  const Rect2 lower{{x0, 0.0}, {x1, y0}}, upper{{x0, y0 + gap}, {x1, 1.0}};
  m.obstacles.push_back(box2(lower.min.x, lower.min.y, lower.max.x, lower.max.y));
  m.obstacles.push_back(box2(upper.min.x, upper.min.y, upper.max.x, upper.max.y));
  add_discs(m, rng, place_discs(rng, clutter, 0.015, 0.035, m.bounds, {lower, upper}, keepout, 0.006, 0.02));
  return m;
}

inline Map2 multi_room(Rng& rng, const ScenarioSpec& s, int rooms, int clutter, const std::vector<Point2>& keepout,
                       double& narrowest) {
  Map2 m{{{0, 0}, {1, 1}}, {}};
  const double cell = 1.0 / rooms, t = 0.01;
  std::vector<Rect2> walls;
  narrowest = 1.0;
  // Vertical walls run the full height of each room row; horizontal walls stop at the vertical ones.
  for (int k = 1; k < rooms; ++k)
    for (int l = 0; l < rooms; ++l) {
      const double w = pick_width(s, rng, 0.035, 0.05);
      narrowest = std::min(narrowest, w);
      const double lo = l * cell + (l > 0 ? t / 2 : 0.0), hi = (l + 1) * cell - (l + 1 < rooms ? t / 2 : 0.0);
      const double d = uniform(rng, lo + t, hi - t - w);
      walls.push_back({{k * cell - t / 2, lo}, {k * cell + t / 2, d}});
      walls.push_back({{k * cell - t / 2, d + w}, {k * cell + t / 2, hi}});
    }
  for (int l = 1; l < rooms; ++l)
    for (int k = 0; k < rooms; ++k) {
      const double w = pick_width(s, rng, 0.035, 0.05);
      narrowest = std::min(narrowest, w);
      const double lo = k * cell + (k > 0 ? t / 2 : 0.0), hi = (k + 1) * cell - (k + 1 < rooms ? t / 2 : 0.0);
      const double d = uniform(rng, lo + t, hi - t - w);
      walls.push_back({{lo, l * cell - t / 2}, {d, l * cell + t / 2}});
      walls.push_back({{d + w, l * cell - t / 2}, {hi, l * cell + t / 2}});
    }
  // Junction posts fill the crossings between horizontal pieces and vertical walls.
  for (int k = 1; k < rooms; ++k)
    for (int l = 1; l < rooms; ++l) walls.push_back({{k * cell - t / 2, l * cell - t / 2}, {k * cell + t / 2, l * cell + t / 2}});
  for (const Rect2& r : walls) m.obstacles.push_back(box2(r.min.x, r.min.y, r.max.x, r.max.y));
  // Keep clutter off the door approaches.
  std::vector<Rect2> blockers;
  for (const Rect2& r : walls) blockers.push_back({r.min - Point2{0.03, 0.03}, r.max + Point2{0.03, 0.03}});
  add_discs(m, rng, place_discs(rng, clutter, 0.008, 0.02, m.bounds, blockers, keepout, 0.004, 0.02));
  return m;
}

inline Aabb3 box3(double x0, double y0, double z0, double x1, double y1, double z1) {
  return {{x0, y0, z0}, {x1, y1, z1}};
}

/// Thin wall across the full face of `span` (normal along `axis` at `pos`), with a square hole at (u, v) of side w.
inline void wall_with_hole(std::vector<Aabb3>& out, int axis, double pos, double t, const Aabb3& span, double u, double v,
                           double w) {
  const int a = (axis + 1) % 3, b = (axis + 2) % 3;
  auto make = [&](double a0, double a1, double b0, double b1) {
    if (a1 - a0 <= 0.0 || b1 - b0 <= 0.0) return;
    Aabb3 box;
    box.min[axis] = pos - t / 2;
    box.max[axis] = pos + t / 2;
    box.min[a] = a0;
    box.max[a] = a1;
    box.min[b] = b0;
    box.max[b] = b1;
    out.push_back(box);
  };
  make(span.min[a], u, span.min[b], span.max[b]);
  make(u + w, span.max[a], span.min[b], span.max[b]);
  make(u, u + w, span.min[b], v);
  make(u, u + w, v + w, span.max[b]);
}

inline Map3 bn_office3d(Rng& rng, const ScenarioSpec& s, int furniture, const std::vector<Point3>& keepout,
                        double& narrowest) {
  Map3 m{box3(0, 0, 0, 1, 1, 1), {}};
  const int rooms = 4;
  const double cell = 1.0 / rooms, t = 0.01;
  narrowest = 1.0;
  for (int axis = 0; axis < 2; ++axis)
    for (int k = 1; k < rooms; ++k)
      for (int l = 0; l < rooms; ++l) {
        const double w = pick_width(s, rng, 0.035, 0.05);
        narrowest = std::min(narrowest, w);
        Aabb3 span = box3(0, 0, 0, 1, 1, 1);
        const int along = 1 - axis;
        span.min[along] = l * cell;
        span.max[along] = (l + 1) * cell;
        const double along_pos = uniform(rng, span.min[along] + t + 0.01, span.max[along] - t - 0.01 - w);
        const double z = uniform(rng, 0.05, 0.95 - w);
        // Tangent axes of the wall are ((axis+1)%3, (axis+2)%3).
        if ((axis + 1) % 3 == along)
          wall_with_hole(m.obstacles, axis, k * cell, t, span, along_pos, z, w);
        else
          wall_with_hole(m.obstacles, axis, k * cell, t, span, z, along_pos, w);
      }
  std::vector<Point2> keep2;
  for (const Point3& p : keepout) keep2.push_back({p.x, p.y});
  int placed = 0;
  for (int room = 0; room < rooms * rooms; ++room) {
    const int per_room = furniture / (rooms * rooms) + (room < furniture % (rooms * rooms) ? 1 : 0);
    const int rx = room % rooms, ry = room / rooms;
    const Rect2 region{{rx * cell + 0.03, ry * cell + 0.03}, {(rx + 1) * cell - 0.03, (ry + 1) * cell - 0.03}};
    for (const Disc& d : place_discs(rng, per_room, 0.01, 0.03, region, {}, keep2, 0.004, 0.03)) {
      const double height = uniform(rng, 0.05, 0.4);
      m.obstacles.push_back(box3(d.c.x - d.r, d.c.y - d.r, 0.0, d.c.x + d.r, d.c.y + d.r, height));
      ++placed;
    }
  }
  (void)placed;
  return m;
}

inline Map3 bn_maze3d(Rng& rng, const ScenarioSpec& s, int n, double& narrowest) {
  Map3 m{box3(0, 0, 0, 1, 1, 1), {}};
  const double cell = 1.0 / n, t = 0.01;
  const auto carved = carve_maze(rng, {n, n, n});
  narrowest = 1.0;
  for (int axis = 0; axis < 3; ++axis)
    for (int id = 0; id < n * n * n; ++id) {
      int c[3] = {id % n, (id / n) % n, id / (n * n)};
      if (c[axis] + 1 >= n) continue;
      int nb[3] = {c[0], c[1], c[2]};
      ++nb[axis];
      const int other = nb[0] + n * (nb[1] + n * nb[2]);
      Aabb3 span;
      for (int a = 0; a < 3; ++a) {
        span.min[a] = c[a] * cell;
        span.max[a] = (c[a] + 1) * cell;
      }
      const double pos = (c[axis] + 1) * cell;
      if (std::binary_search(carved.begin(), carved.end(), std::pair{id, other})) {
        const double w = pick_width(s, rng, 0.035, 0.05);
        narrowest = std::min(narrowest, w);
        const int a = (axis + 1) % 3, b = (axis + 2) % 3;
        const double u = uniform(rng, span.min[a] + t + 0.01, span.max[a] - t - 0.01 - w);
        const double v = uniform(rng, span.min[b] + t + 0.01, span.max[b] - t - 0.01 - w);
        wall_with_hole(m.obstacles, axis, pos, t, span, u, v, w);
      } else {
        Aabb3 box = span;
        box.min[axis] = pos - t / 2;
        box.max[axis] = pos + t / 2;
        m.obstacles.push_back(box);
      }
    }
  return m;
}

inline Map3 bn_layers3d(Rng& rng, const ScenarioSpec& s, int layers, int holes, int clutter,
                        const std::vector<Point3>& keepout, double& narrowest) {
  Map3 m{box3(0, 0, 0, 1, 1, 1), {}};
  const double t = 0.02;
  narrowest = 1.0;
  std::vector<Rect2> hole_rects;
  for (int l = 0; l < layers; ++l) {
    const double z = (l + 1.0) / (layers + 1.0);
    std::vector<Rect2> hs;
    std::vector<Disc> centers;
    for (int attempt = 0; static_cast<int>(hs.size()) < holes; ++attempt) {
      if (attempt > 10000) throw Error(ErrorCode::InvalidSpec, "cannot place floor holes");
      // Square holes with the area of a disc of radius 0.04-0.05.
      const double radius = s.door_width > 0.0 ? s.door_width / std::sqrt(std::numbers::pi) : uniform(rng, 0.04, 0.05);
      const double side = std::sqrt(std::numbers::pi) * radius;
      const Point2 c{uniform(rng, 0.1 + side / 2, 0.9 - side / 2), uniform(rng, 0.1 + side / 2, 0.9 - side / 2)};
      bool ok = true;
      for (const Disc& d : centers) ok = ok && distance(c, d.c) > 0.15;
      if (!ok) continue;
      centers.push_back({c, side});
      hs.push_back({{c.x - side / 2, c.y - side / 2}, {c.x + side / 2, c.y + side / 2}});
      narrowest = std::min(narrowest, side);
    }
    std::vector<double> xs{0.0, 1.0}, ys{0.0, 1.0};
    for (const Rect2& h : hs) {
      xs.insert(xs.end(), {h.min.x, h.max.x});
      ys.insert(ys.end(), {h.min.y, h.max.y});
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    for (std::size_t j = 0; j + 1 < ys.size(); ++j)
      for (std::size_t i = 0; i + 1 < xs.size();) {
        auto in_hole = [&](std::size_t k) {
          const Point2 mid{(xs[k] + xs[k + 1]) / 2, (ys[j] + ys[j + 1]) / 2};
          return std::any_of(hs.begin(), hs.end(), [&](const Rect2& h) { return h.contains(mid); });
        };
        if (in_hole(i)) {
          ++i;
          continue;
        }
        std::size_t end = i;
        while (end + 2 < xs.size() && !in_hole(end + 1)) ++end;
        m.obstacles.push_back(box3(xs[i], ys[j], z - t / 2, xs[end + 1], ys[j + 1], z + t / 2));
        i = end + 1;
      }
    for (const Rect2& h : hs) hole_rects.push_back({h.min - Point2{0.03, 0.03}, h.max + Point2{0.03, 0.03}});
  }
  std::vector<Point2> keep2;
  for (const Point3& p : keepout) keep2.push_back({p.x, p.y});
  for (const Disc& d : place_discs(rng, clutter, 0.015, 0.04, {{0, 0}, {1, 1}}, hole_rects, keep2, 0.005, 0.04)) {
    const int level = uniform_int(rng, 0, layers);
    const double z0 = level / (layers + 1.0) + (level > 0 ? t / 2 : 0.0);
    const double gap = 1.0 / (layers + 1.0) - t;
    m.obstacles.push_back(box3(d.c.x - d.r, d.c.y - d.r, z0, d.c.x + d.r, d.c.y + d.r, z0 + uniform(rng, 0.2, 0.6) * gap));
  }
  return m;
}

inline bool connected_3d(const Map3& m, Point3 qs, Point3 qg);

inline Map3 dense3d(Rng& rng, int count, const std::vector<Point3>& keepout) {
  for (int round = 0;; ++round) {
    if (round > 50) throw Error(ErrorCode::InvalidSpec, "cannot generate a solvable dense 3D map");
    Map3 m{box3(0, 0, 0, 1, 1, 1), {}};
    while (static_cast<int>(m.obstacles.size()) < count) {
      Point3 c{uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)};
      Point3 half{uniform(rng, 0.015, 0.05), uniform(rng, 0.015, 0.05), uniform(rng, 0.015, 0.05)};
      Aabb3 b{c - half, c + half};
      for (int a = 0; a < 3; ++a) {
        b.min[a] = std::max(0.0, b.min[a]);
        b.max[a] = std::min(1.0, b.max[a]);
      }
      bool ok = true;
      for (const Point3& p : keepout) ok = ok && point_box_distance(p, b) > 0.03;
      if (ok) m.obstacles.push_back(b);
    }
    if (connected_3d(m, keepout[0], keepout[1])) return m;
  }
}

template <typename G>
bool graph_connects(const G& g) {
  std::vector<char> seen(g.num_cells(), 0);
  std::queue<int> q;
  q.push(g.start_cell);
  seen[g.start_cell] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == g.goal_cell) return true;
    for (const Link& l : g.adjacency[u])
      if (!seen[l.cell]) {
        seen[l.cell] = 1;
        q.push(l.cell);
      }
  }
  return false;
}

inline bool connected_3d(const Map3& m, Point3 qs, Point3 qg) {
  return graph_connects(build_graph(slab_decompose(m), qs, qg));
}

}  // namespace detail

/// Breadth-first check that start and goal share a connected component of free cells.
inline bool is_solvable(const Scenario& s) {
  try {
    if (s.dim == 2) return detail::graph_connects(build_graph(triangulate(s.map2), s.start2(), s.goal2()));
    return detail::connected_3d(s.map3, s.start3(), s.goal3());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::StartInObstacle || e.code() == ErrorCode::GoalInObstacle) return false;
    throw;
  }
}

inline Scenario generate(const ScenarioSpec& spec) {
  const int dim = family_dimension(spec.family);
  if (spec.door_width == 0.0 || spec.door_width > 0.2 || std::isnan(spec.door_width))
    throw Error(ErrorCode::InvalidSpec, "door width must be in (0, 0.2]");
  if (spec.obstacles > 5000 || spec.clutter > 5000) throw Error(ErrorCode::InvalidSpec, "obstacle count too large");
  if ((!spec.start.empty() && static_cast<int>(spec.start.size()) != dim) ||
      (!spec.goal.empty() && static_cast<int>(spec.goal.size()) != dim))
    throw Error(ErrorCode::InvalidSpec, "query dimension does not match family");
  Scenario s;
  s.family = spec.family;
  s.seed = spec.seed;
  s.dim = dim;
  s.start = spec.start.empty() ? std::vector<double>(dim, 0.05) : spec.start;
  s.goal = spec.goal.empty() ? std::vector<double>(dim, 0.95) : spec.goal;
  detail::Rng rng(spec.seed);
  const std::vector<Point2> keep2{{s.start[0], s.start[1]}, {s.goal[0], s.goal[1]}};
  std::vector<Point3> keep3;
  if (dim == 3) keep3 = {s.start3(), s.goal3()};
  const std::string& f = spec.family;
  if (f == "forest") {
    s.map2 = detail::forest(rng, detail::pick(spec.obstacles, 40), 0.02, 0.05, keep2);
  } else if (f == "dense2d") {
    s.map2 = detail::forest(rng, detail::pick(spec.obstacles, 150), 0.01, 0.03, keep2);
  } else if (f == "labyrinth") {
    const int n = detail::pick(spec.size, 8);
    if (n < 2 || n > 40) throw Error(ErrorCode::InvalidSpec, "labyrinth size must be in [2, 40]");
    s.map2 = detail::labyrinth(rng, n);
  } else if (f == "bottleneck2d") {
    s.door_width = spec.door_width > 0.0 ? spec.door_width : 0.002;
    s.map2 = detail::bottleneck2d(rng, s.door_width, detail::pick(spec.clutter, 60), keep2);
  } else if (f == "multi_room") {
    const int n = detail::pick(spec.size, 4);
    if (n < 2 || n > 8) throw Error(ErrorCode::InvalidSpec, "multi_room size must be in [2, 8]");
    s.map2 = detail::multi_room(rng, spec, n, detail::pick(spec.clutter, 30), keep2, s.door_width);
  } else if (f == "bn_office3d") {
    const int furniture = spec.clutter >= 0 ? spec.clutter : 85 + detail::uniform_int(rng, 0, 9);
    s.map3 = detail::bn_office3d(rng, spec, furniture, keep3, s.door_width);
  } else if (f == "bn_maze3d") {
    const int n = detail::pick(spec.size, 3);
    if (n < 2 || n > 6) throw Error(ErrorCode::InvalidSpec, "bn_maze3d size must be in [2, 6]");
    s.map3 = detail::bn_maze3d(rng, spec, n, s.door_width);
  } else if (f == "bn_layers3d") {
    const int layers = detail::pick(spec.size, 3);
    if (layers < 1 || layers > 8) throw Error(ErrorCode::InvalidSpec, "bn_layers3d size must be in [1, 8]");
    s.map3 = detail::bn_layers3d(rng, spec, layers, detail::pick(spec.obstacles, 2), detail::pick(spec.clutter, 20),
                                 keep3, s.door_width);
  } else {
    s.map3 = detail::dense3d(rng, detail::pick(spec.obstacles, 120), keep3);
  }
  return s;
}

// Dynamic sequences.

enum class ObstacleKind { Static, Moving, Toggling };

struct DynamicObstacle {
  ObstacleKind kind = ObstacleKind::Static;
  Point2 center;
  double radius = 0.0;
  double phase = 0.0;
  Point2 velocity;
  /// Moving obstacles reflect inside this box.
  Rect2 lane;
  int toggle_offset = 0;
};

struct DynamicStep {
  std::vector<SimplePolygon> obstacles;
};

struct DynamicScenario {
  Rect2 bounds{{0, 0}, {1, 1}};
  Point2 start;
  Point2 goal;
  double dt = 1.0;
  std::vector<DynamicObstacle> obstacles;
  std::vector<DynamicStep> steps;

  Map2 map_at(std::size_t step) const { return {bounds, steps.at(step).obstacles}; }
};

inline double reflect(double x, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) return lo;
  double u = std::fmod(x - lo, 2 * span);
  if (u < 0) u += 2 * span;
  return lo + (u <= span ? u : 2 * span - u);
}

/// Obstacles occupy distinct cells of a coarse grid, so no two ever overlap; kinds split 50/30/20.
inline DynamicScenario generate_dynamic(std::uint64_t seed, int count, int steps) {
  if (count < 0 || steps < 1 || count > 400) throw Error(ErrorCode::InvalidSpec, "invalid dynamic scenario size");
  detail::Rng rng(seed);
  DynamicScenario d;
  d.start = {0.05, 0.05};
  d.goal = {0.95, 0.95};
  const int grid = static_cast<int>(std::ceil(std::sqrt(count + 2.0))) + 1;
  const double cell = 1.0 / grid;
  std::vector<int> slots;
  for (int i = 0; i < grid * grid; ++i) {
    const Rect2 r{{(i % grid) * cell, (i / grid) * cell}, {(i % grid + 1) * cell, (i / grid + 1) * cell}};
    if (detail::rect_distance(d.start, r) < 0.03 || detail::rect_distance(d.goal, r) < 0.03) continue;
    slots.push_back(i);
  }
  if (static_cast<int>(slots.size()) < count) throw Error(ErrorCode::InvalidSpec, "too many dynamic obstacles");
  std::shuffle(slots.begin(), slots.end(), rng);
  const int n_static = static_cast<int>(std::lround(0.5 * count));
  const int n_moving = static_cast<int>(std::lround(0.3 * count));
  for (int i = 0; i < count; ++i) {
    const int slot = slots[i];
    DynamicObstacle o;
    o.kind = i < n_static ? ObstacleKind::Static : i < n_static + n_moving ? ObstacleKind::Moving : ObstacleKind::Toggling;
    o.radius = cell * detail::uniform(rng, 0.15, 0.25);
    const double margin = o.radius + 0.1 * cell;
    o.lane = {{(slot % grid) * cell + margin, (slot / grid) * cell + margin},
              {(slot % grid + 1) * cell - margin, (slot / grid + 1) * cell - margin}};
    o.center = {detail::uniform(rng, o.lane.min.x, o.lane.max.x), detail::uniform(rng, o.lane.min.y, o.lane.max.y)};
    o.phase = detail::uniform(rng, 0.0, std::numbers::pi / 4);
    if (o.kind == ObstacleKind::Moving) {
      const double a = detail::uniform(rng, 0.0, 2 * std::numbers::pi);
      o.velocity = Point2{std::cos(a), std::sin(a)} * (0.2 * cell);
    }
    o.toggle_offset = detail::uniform_int(rng, 0, 1);
    d.obstacles.push_back(o);
  }
  for (int k = 0; k < steps; ++k) {
    DynamicStep st;
    for (const auto& o : d.obstacles) {
      if (o.kind == ObstacleKind::Toggling && (k + o.toggle_offset) % 2 == 1) continue;
      Point2 c = o.center;
      if (o.kind == ObstacleKind::Moving)
        c = {reflect(o.center.x + o.velocity.x * k, o.lane.min.x, o.lane.max.x),
             reflect(o.center.y + o.velocity.y * k, o.lane.min.y, o.lane.max.y)};
      st.obstacles.push_back(detail::octagon(c, o.radius, o.phase));
    }
    d.steps.push_back(std::move(st));
  }
  return d;
}

// Dense post-validation. Obstacles are open sets: boundary contact is not a violation.

inline constexpr double kPenetrationTolerance = 1e-9;

inline bool violates(const Map2& m, Point2 p) {
  if (p.x < m.bounds.min.x - kPenetrationTolerance || p.x > m.bounds.max.x + kPenetrationTolerance ||
      p.y < m.bounds.min.y - kPenetrationTolerance || p.y > m.bounds.max.y + kPenetrationTolerance)
    return true;
  for (const auto& o : m.obstacles)
    if (point_in_polygon(p, o) && point_polygon_boundary_distance(p, o) > kPenetrationTolerance) return true;
  return false;
}

inline bool violates(const Map3& m, Point3 p) {
  for (int a = 0; a < 3; ++a)
    if (p[a] < m.bounds.min[a] - kPenetrationTolerance || p[a] > m.bounds.max[a] + kPenetrationTolerance) return true;
  for (const auto& o : m.obstacles)
    if (o.interior_contains(p, kPenetrationTolerance)) return true;
  return false;
}

/// Samples every segment at `density` points per unit length (endpoints included) and counts points inside obstacles.
template <typename Map, Vector V>
long post_validate(const std::vector<V>& waypoints, const Map& map, double density) {
  if (!(density > 0.0)) throw Error(ErrorCode::InvalidInput, "sampling density must be positive");
  long violations = 0;
  if (waypoints.size() == 1) return violates(map, waypoints[0]) ? 1 : 0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const V a = waypoints[i], b = waypoints[i + 1];
    const long n = std::max(1L, static_cast<long>(std::ceil(distance(a, b) * density)));
    for (long k = i == 0 ? 0 : 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      if (violates(map, a + (b - a) * t)) ++violations;
    }
  }
  return violations;
}

template <typename Map, Vector V>
long post_validate(const PathSolution<V>& path, const Map& map, double density) {
  return post_validate(path.waypoints, map, density);
}

}  // namespace navcell
