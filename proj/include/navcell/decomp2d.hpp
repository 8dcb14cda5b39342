#pragma once

// Constrained Delaunay triangulation of a rectangular workspace with polygonal
// obstacles. The rectangle itself is the super-structure, so the triangles
// cover the workspace exactly. Faces are labeled free/obstacle by parity flood
// fill across constrained (obstacle) edges.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "navcell/error.hpp"
#include "navcell/geom.hpp"

namespace navcell {

struct Map2 {
  Rect2 bounds;
  std::vector<SimplePolygon> obstacles;
};

struct Triangulation {
  Rect2 bounds;
  std::vector<Point2> vertices;
  /// Counterclockwise vertex triples.
  std::vector<std::array<int, 3>> triangles;
  /// neighbors[t][i] is the triangle across the edge opposite triangles[t][i], or -1.
  std::vector<std::array<int, 3>> neighbors;
  /// constrained[t][i] flags the edge opposite triangles[t][i] as an obstacle edge.
  std::vector<std::array<bool, 3>> constrained;
  std::vector<bool> free;
  std::vector<SimplePolygon> obstacles;

  std::size_t size() const { return triangles.size(); }

  Point2 corner(std::size_t t, int i) const { return vertices[triangles[t][i]]; }

  /// Edge opposite local vertex i, in counterclockwise order.
  Segment2 edge(std::size_t t, int i) const {
    return {corner(t, (i + 1) % 3), corner(t, (i + 2) % 3)};
  }

  double area(std::size_t t) const {
    const Point2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    return 0.5 * cross(b - a, c - a);
  }

  Point2 centroid(std::size_t t) const {
    return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0;
  }

  /// Boundary-inclusive containment test using exact orientation.
  bool contains(std::size_t t, Point2 p) const {
    for (int i = 0; i < 3; ++i)
      if (orient2d(corner(t, (i + 1) % 3), corner(t, (i + 2) % 3), p) < 0) return false;
    return true;
  }

  std::vector<int> free_triangles() const {
    std::vector<int> out;
    for (std::size_t t = 0; t < size(); ++t)
      if (free[t]) out.push_back(static_cast<int>(t));
    return out;
  }

  double free_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < size(); ++t)
      if (free[t]) s += area(t);
    return s;
  }
};

namespace detail {

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};
  std::array<bool, 3> c{false, false, false};
};

inline int next3(int i) { return i == 2 ? 0 : i + 1; }
inline int prev3(int i) { return i == 0 ? 2 : i - 1; }

class CdtBuilder {
 public:
  explicit CdtBuilder(const Rect2& bounds) : bounds_(bounds) {
    const int c0 = add_vertex(bounds.min);
    const int c1 = add_vertex({bounds.max.x, bounds.min.y});
    const int c2 = add_vertex(bounds.max);
    const int c3 = add_vertex({bounds.min.x, bounds.max.y});
    Tri t0, t1;
    t0.v = {c0, c1, c2};
    t1.v = {c0, c2, c3};
    tris_.push_back(t0);
    tris_.push_back(t1);
    // t0 edge opposite c1 is (c2,c0), shared with t1's edge opposite c3 (c0,c2).
    tris_[0].n[1] = 1;
    tris_[1].n[2] = 0;
    for (int t = 0; t < 2; ++t)
      for (int v : tris_[t].v) vert_tri_[v] = t;
  }

  /// Returns the vertex id for p, merging with an existing vertex within kSnap.
  int intern(Point2 p) {
    p.x = snap_to(p.x, bounds_.min.x, bounds_.max.x);
    p.y = snap_to(p.y, bounds_.min.y, bounds_.max.y);
    const auto lo = index_.lower_bound({p.x - tol::kSnap, -std::numeric_limits<double>::infinity()});
    for (auto it = lo; it != index_.end() && it->first.first <= p.x + tol::kSnap; ++it) {
      if (std::abs(it->first.second - p.y) <= tol::kSnap) return it->second;
    }
    const int id = add_vertex(p);
    pending_.push_back(id);
    return id;
  }

  void insert_pending() {
    std::vector<int> order = pending_;
    pending_.clear();
    std::sort(order.begin(), order.end(), [&](int a, int b) { return pts_[a] < pts_[b]; });
    for (int v : order) insert_point(v);
  }

  void insert_constraint(int a, int b) {
    if (a == b) return;
    std::vector<std::pair<int, int>> work{{a, b}};
    while (!work.empty()) {
      auto [u, w] = work.back();
      work.pop_back();
      if (auto split = insert_constraint_piece(u, w)) {
        work.push_back({*split, w});
        work.push_back({u, *split});
      }
    }
  }

  void restore_delaunay() {
    std::vector<std::pair<int, int>> stack;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      for (int i = 0; i < 3; ++i)
        if (tris_[t].n[i] > t) stack.push_back({t, i});
    std::size_t guard = 0;
    const std::size_t guard_limit = 64 * tris_.size() * tris_.size() + 1024;
    while (!stack.empty() && guard++ < guard_limit) {
      auto [t, i] = stack.back();
      stack.pop_back();
      legalize_edge(t, i, stack, true);
    }
  }

  Triangulation finish(std::vector<SimplePolygon> obstacles) {
    Triangulation out;
    out.bounds = bounds_;
    out.vertices = pts_;
    out.obstacles = std::move(obstacles);
    out.triangles.reserve(tris_.size());
    for (const Tri& t : tris_) {
      out.triangles.push_back(t.v);
      out.neighbors.push_back(t.n);
      out.constrained.push_back(t.c);
    }
    out.free = label_free();
    return out;
  }

 private:
  static double snap_to(double v, double lo, double hi) {
    if (std::abs(v - lo) <= tol::kSnap) return lo;
    if (std::abs(v - hi) <= tol::kSnap) return hi;
    return v;
  }

  int add_vertex(Point2 p) {
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vert_tri_.push_back(-1);
    index_.emplace(std::make_pair(p.x, p.y), id);
    return id;
  }

  void set_tri(int t, const Tri& tri) {
    tris_[t] = tri;
    for (int v : tri.v) vert_tri_[v] = t;
  }

  int new_tri(const Tri& tri) {
    tris_.push_back(tri);
    const int t = static_cast<int>(tris_.size()) - 1;
    for (int v : tri.v) vert_tri_[v] = t;
    return t;
  }

  void replace_neighbor(int t, int old_n, int new_n) {
    if (t < 0) return;
    for (int& n : tris_[t].n)
      if (n == old_n) {
        n = new_n;
        return;
      }
  }

  /// Index of the edge (a,b) (either orientation) in triangle t, or -1.
  int edge_index(int t, int a, int b) const {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
      const int p = v[next3(i)], q = v[prev3(i)];
      if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return -1;
  }

  int local_index(int t, int v) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].v[i] == v) return i;
    return -1;
  }

  int orient(int a, int b, int c) const { return orient2d(pts_[a], pts_[b], pts_[c]); }

  /// Triangles incident to v, in counterclockwise order where possible.
  std::vector<int> fan(int v) const {
    std::vector<int> out;
    const int t0 = vert_tri_[v];
    int t = t0;
    bool closed = false;
    while (true) {
      out.push_back(t);
      const int k = local_index(t, v);
      const int nxt = tris_[t].n[next3(k)];
      if (nxt < 0) break;
      if (nxt == t0) {
        closed = true;
        break;
      }
      t = nxt;
    }
    if (!closed) {
      t = t0;
      while (true) {
        const int k = local_index(t, v);
        const int prv = tris_[t].n[prev3(k)];
        if (prv < 0) break;
        t = prv;
        out.insert(out.begin(), t);
      }
    }
    return out;
  }

  /// Walk toward p. Returns (triangle, edge index if p lies on that edge else -1).
  std::pair<int, int> locate(Point2 p) const {
    int t = last_;
    if (t < 0 || t >= static_cast<int>(tris_.size())) t = 0;
    std::size_t steps = 0;
    unsigned rot = 0;
    while (steps++ < 4 * tris_.size() + 16) {
      bool moved = false;
      const int start = static_cast<int>(rot++ % 3);
      for (int j = 0; j < 3; ++j) {
        const int i = (start + j) % 3;
        const auto& tri = tris_[t];
        if (orient2d(pts_[tri.v[next3(i)]], pts_[tri.v[prev3(i)]], p) < 0 && tri.n[i] >= 0) {
          t = tri.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return {t, on_edge(t, p)};
    }
    for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
      bool inside = true;
      for (int i = 0; i < 3 && inside; ++i)
        inside = orient2d(pts_[tris_[s].v[next3(i)]], pts_[tris_[s].v[prev3(i)]], p) >= 0;
      if (inside) return {s, on_edge(s, p)};
    }
    throw Error(ErrorCode::InvalidInput, "point outside the triangulated workspace");
  }

  int on_edge(int t, Point2 p) const {
    for (int i = 0; i < 3; ++i)
      if (orient2d(pts_[tris_[t].v[next3(i)]], pts_[tris_[t].v[prev3(i)]], p) == 0) return i;
    return -1;
  }

  void insert_point(int p) {
    auto [t, e] = locate(pts_[p]);
    std::vector<std::pair<int, int>> stack;
    if (e < 0) {
      split_triangle(t, p, stack);
    } else {
      split_edge(t, e, p, stack);
    }
    while (!stack.empty()) {
      auto [tt, ii] = stack.back();
      stack.pop_back();
      legalize_edge(tt, ii, stack);
    }
    last_ = vert_tri_[p];
  }

  void split_triangle(int t, int p, std::vector<std::pair<int, int>>& stack) {
    const Tri old = tris_[t];
    const int a = old.v[0], b = old.v[1], c = old.v[2];
    const int t1 = static_cast<int>(tris_.size());
    const int t2 = t1 + 1;
    Tri n0, n1, n2;
    n0.v = {a, b, p};
    n0.n = {t1, t2, old.n[2]};
    n0.c = {false, false, old.c[2]};
    n1.v = {b, c, p};
    n1.n = {t2, t, old.n[0]};
    n1.c = {false, false, old.c[0]};
    n2.v = {c, a, p};
    n2.n = {t, t1, old.n[1]};
    n2.c = {false, false, old.c[1]};
    set_tri(t, n0);
    new_tri(n1);
    new_tri(n2);
    replace_neighbor(old.n[0], t, t1);
    replace_neighbor(old.n[1], t, t2);
    stack.push_back({t, 2});
    stack.push_back({t1, 2});
    stack.push_back({t2, 2});
  }

  void split_edge(int t, int e, int p, std::vector<std::pair<int, int>>& stack) {
    // t = (x, q, r) with x opposite the split edge (q, r).
    const Tri ot = tris_[t];
    const int x = ot.v[e], q = ot.v[next3(e)], r = ot.v[prev3(e)];
    const int u = ot.n[e];
    const bool con = ot.c[e];
    const int n_xq = ot.n[prev3(e)];
    const int n_rx = ot.n[next3(e)];
    const int t_new = static_cast<int>(tris_.size());
    const int u_new = u >= 0 ? t_new + 1 : -1;
    // t -> (x, q, p), t_new -> (x, p, r)
    Tri a, b;
    a.v = {x, q, p};
    a.n = {u_new, t_new, n_xq};
    a.c = {con, false, ot.c[prev3(e)]};
    b.v = {x, p, r};
    b.n = {u, n_rx, t};
    b.c = {con, ot.c[next3(e)], false};
    set_tri(t, a);
    new_tri(b);
    replace_neighbor(n_rx, t, t_new);
    stack.push_back({t, 2});
    stack.push_back({t_new, 1});
    if (u < 0) return;
    // u = (y, r, q) -> u = (y, r, p), u_new = (y, p, q)
    const Tri ou = tris_[u];
    const int j = edge_index(u, q, r);
    const int y = ou.v[j];
    const int n_yr = ou.n[prev3(j)];
    const int n_qy = ou.n[next3(j)];
    Tri c, d;
    c.v = {y, r, p};
    c.n = {t_new, u_new, n_yr};
    c.c = {con, false, ou.c[prev3(j)]};
    d.v = {y, p, q};
    d.n = {t, n_qy, u};
    d.c = {con, ou.c[next3(j)], false};
    set_tri(u, c);
    new_tri(d);
    replace_neighbor(n_qy, u, u_new);
    stack.push_back({u, 2});
    stack.push_back({u_new, 1});
  }

  /// Flip edge i of t if it is unconstrained and not locally Delaunay.
  void legalize_edge(int t, int i, std::vector<std::pair<int, int>>& stack, bool all_edges = false) {
    const Tri& tri = tris_[t];
    const int u = tri.n[i];
    if (u < 0 || tri.c[i]) return;
    const int p = tri.v[i], q = tri.v[next3(i)], r = tri.v[prev3(i)];
    const int j = edge_index(u, q, r);
    const int d = tris_[u].v[j];
    if (incircle(pts_[p], pts_[q], pts_[r], pts_[d]) <= 0) return;
    flip(t, i);
    // t = (p, q, d), u = (p, d, r)
    stack.push_back({t, 0});
    stack.push_back({u, 0});
    if (all_edges) {
      stack.push_back({t, 2});
      stack.push_back({u, 1});
    }
  }

  /// Flip the edge opposite vertex i of t. Caller guarantees strict convexity.
  void flip(int t, int i) {
    const Tri ot = tris_[t];
    const int u = ot.n[i];
    const int p = ot.v[i], q = ot.v[next3(i)], r = ot.v[prev3(i)];
    const Tri ou = tris_[u];
    const int j = edge_index(u, q, r);
    const int d = ou.v[j];
    // ou = (d, r, q)
    const int n_tq = ot.n[next3(i)];  // across (r,p)
    const int n_tr = ot.n[prev3(i)];  // across (p,q)
    const bool c_tq = ot.c[next3(i)], c_tr = ot.c[prev3(i)];
    const int ju_r = local_index(u, r), ju_q = local_index(u, q);
    const int n_ur = ou.n[ju_r];  // across (q,d)
    const int n_uq = ou.n[ju_q];  // across (d,r)
    const bool c_ur = ou.c[ju_r], c_uq = ou.c[ju_q];
    Tri a, b;
    a.v = {p, q, d};
    a.n = {n_ur, u, n_tr};
    a.c = {c_ur, false, c_tr};
    b.v = {p, d, r};
    b.n = {n_uq, n_tq, t};
    b.c = {c_uq, c_tq, false};
    set_tri(t, a);
    set_tri(u, b);
    replace_neighbor(n_ur, u, t);
    replace_neighbor(n_tq, t, u);
  }

  /// Inserts constraint (u,w). Returns a vertex lying on the open segment when
  /// the constraint must be split there, otherwise std::nullopt.
  std::optional<int> insert_constraint_piece(int u, int w) {
    if (mark_constrained(u, w)) return std::nullopt;
    const Point2 pu = pts_[u], pw = pts_[w];
    int right = -1, left = -1, start = -1;
    for (int t : fan(u)) {
      const int k = local_index(t, u);
      const int a = tris_[t].v[next3(k)], b = tris_[t].v[prev3(k)];
      for (int c : {a, b}) {
        if (orient(u, w, c) == 0 && dot(pts_[c] - pu, pw - pu) > 0.0) return c;
      }
      if (orient(u, a, w) > 0 && orient(u, b, w) < 0) {
        right = a;
        left = b;
        start = t;
      }
    }
    if (start < 0) throw Error(ErrorCode::InvalidInput, "constraint walk failed to start");

    std::deque<std::pair<int, int>> crossed;
    crossed.push_back({right, left});
    int t = start;
    while (true) {
      const int e = edge_index(t, right, left);
      const int nt = tris_[t].n[e];
      if (nt < 0) throw Error(ErrorCode::InvalidInput, "constraint leaves the workspace");
      const int c = tris_[nt].v[edge_index(nt, right, left)];
      if (c == w) break;
      const int o = orient(u, w, c);
      if (o == 0) return c;
      if (o > 0) {
        left = c;
      } else {
        right = c;
      }
      crossed.push_back({right, left});
      t = nt;
    }

    std::size_t guard = 0;
    const std::size_t guard_limit = 64 * (crossed.size() + 1) * (crossed.size() + 1) + 1024;
    while (!crossed.empty()) {
      if (guard++ > guard_limit) throw Error(ErrorCode::InvalidInput, "constraint recovery did not converge");
      auto [a, b] = crossed.front();
      crossed.pop_front();
      const int ta = find_edge(a, b);
      if (ta < 0) continue;
      const int i = edge_index(ta, a, b);
      const int tb = tris_[ta].n[i];
      const int p = tris_[ta].v[i];
      const int d = tris_[tb].v[edge_index(tb, a, b)];
      const bool convex = orient(p, d, a) * orient(p, d, b) < 0;
      if (!convex) {
        crossed.push_back({a, b});
        continue;
      }
      flip(ta, i);
      if (p != u && p != w && d != u && d != w && orient(u, w, p) * orient(u, w, d) < 0) {
        crossed.push_back({p, d});
      }
    }
    if (!mark_constrained(u, w)) throw Error(ErrorCode::InvalidInput, "constraint recovery failed");
    return std::nullopt;
  }

  int find_edge(int a, int b) const {
    for (int t : fan(a))
      if (edge_index(t, a, b) >= 0) return t;
    return -1;
  }

  bool mark_constrained(int a, int b) {
    const int t = find_edge(a, b);
    if (t < 0) return false;
    const int i = edge_index(t, a, b);
    tris_[t].c[i] = true;
    const int u = tris_[t].n[i];
    if (u >= 0) tris_[u].c[edge_index(u, a, b)] = true;
    return true;
  }

  std::vector<bool> label_free() const {
    const int n = static_cast<int>(tris_.size());
    std::vector<int> parity(n, -1);
    // Seeds: crossing the outer boundary from the (free) outside.
    std::vector<int> layer0, layer1;
    for (int t = 0; t < n; ++t)
      for (int i = 0; i < 3; ++i)
        if (tris_[t].n[i] < 0) (tris_[t].c[i] ? layer1 : layer0).push_back(t);
    std::vector<int> current = layer0;
    std::vector<int> next = layer1;
    int level = 0;
    while (!current.empty() || !next.empty()) {
      std::vector<int> queue;
      for (int t : current)
        if (parity[t] < 0) {
          parity[t] = level;
          queue.push_back(t);
        }
      std::vector<int> upcoming = std::move(next);
      next.clear();
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int t = queue[qi];
        for (int i = 0; i < 3; ++i) {
          const int nb = tris_[t].n[i];
          if (nb < 0) continue;
          if (tris_[t].c[i]) {
            if (parity[nb] < 0) upcoming.push_back(nb);
          } else if (parity[nb] < 0) {
            parity[nb] = level;
            queue.push_back(nb);
          }
        }
      }
      current = std::move(upcoming);
      ++level;
    }
    std::vector<bool> free(n);
    for (int t = 0; t < n; ++t) free[t] = parity[t] >= 0 && parity[t] % 2 == 0;
    return free;
  }

  Rect2 bounds_;
  std::vector<Point2> pts_;
  std::vector<int> vert_tri_;
  std::vector<Tri> tris_;
  std::vector<int> pending_;
  std::multimap<std::pair<double, double>, int> index_;
  int last_ = 0;
};

inline void validate_polygon(const SimplePolygon& poly, const Rect2& bounds, std::size_t index) {
  const std::string tag = "obstacle " + std::to_string(index);
  if (poly.size() < 3) throw Error(ErrorCode::DegenerateObstacle, tag + " has fewer than 3 vertices");
  for (const Point2& p : poly.vertices) {
    if (!is_finite(p)) throw Error(ErrorCode::InvalidInput, tag + " has a non-finite vertex");
    if (p.x < bounds.min.x - tol::kSnap || p.x > bounds.max.x + tol::kSnap || p.y < bounds.min.y - tol::kSnap ||
        p.y > bounds.max.y + tol::kSnap)
      throw Error(ErrorCode::InvalidInput, tag + " extends outside the workspace bounds");
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (distance(poly.vertices[i], poly.vertices[(i + 1) % n]) <= tol::kSnap)
      throw Error(ErrorCode::DegenerateObstacle, tag + " repeats a consecutive vertex");
  if (poly.area() < tol::kDegenerateAreaFraction * bounds.area())
    throw Error(ErrorCode::DegenerateObstacle, tag + " has near-zero area");
  for (std::size_t i = 0; i < n; ++i) {
    const Segment2 ei = poly.edge(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Segment2 ej = poly.edge(j);
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex.
        const Point2 shared = (j == i + 1) ? ei.b : ei.a;
        const Point2 far_i = (j == i + 1) ? ei.a : ei.b;
        const Point2 far_j = (j == i + 1) ? ej.b : ej.a;
        if (orient2d(far_i, shared, far_j) == 0 && dot(far_i - shared, far_j - shared) > 0.0)
          throw Error(ErrorCode::DegenerateObstacle, tag + " folds back on itself");
        continue;
      }
      if (segments_intersect(ei.a, ei.b, ej.a, ej.b))
        throw Error(ErrorCode::DegenerateObstacle, tag + " is self-intersecting");
    }
  }
}

struct EdgeRef {
  Segment2 seg;
  Rect2 box;
  std::size_t poly;
};

inline void validate_disjoint(const std::vector<SimplePolygon>& obstacles) {
  std::vector<EdgeRef> edges;
  for (std::size_t p = 0; p < obstacles.size(); ++p)
    for (std::size_t i = 0; i < obstacles[p].size(); ++i) {
      const Segment2 s = obstacles[p].edge(i);
      edges.push_back({s, {{std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)}, {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)}}, p});
    }
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a].box.min.x < edges[b].box.min.x; });
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const EdgeRef& e = edges[order[oi]];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const EdgeRef& f = edges[order[oj]];
      if (f.box.min.x > e.box.max.x) break;
      if (e.poly == f.poly) continue;
      if (f.box.min.y > e.box.max.y || f.box.max.y < e.box.min.y) continue;
      if (segments_properly_intersect(e.seg.a, e.seg.b, f.seg.a, f.seg.b))
        throw Error(ErrorCode::OverlappingObstacles,
                    "obstacles " + std::to_string(e.poly) + " and " + std::to_string(f.poly) + " overlap");
    }
  }
}

}  // namespace detail

/// Constrained Delaunay triangulation of `bounds` with obstacle edges as
/// constraints; each triangle labeled free or obstacle by crossing parity.
inline Triangulation triangulate(const Rect2& bounds, const std::vector<SimplePolygon>& obstacles) {
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y) || !is_finite(bounds.min) || !is_finite(bounds.max))
    throw Error(ErrorCode::InvalidInput, "workspace bounds are empty");
  for (std::size_t i = 0; i < obstacles.size(); ++i) detail::validate_polygon(obstacles[i], bounds, i);
  detail::validate_disjoint(obstacles);

  detail::CdtBuilder builder(bounds);
  std::vector<std::vector<int>> ids(obstacles.size());
  for (std::size_t p = 0; p < obstacles.size(); ++p)
    for (const Point2& v : obstacles[p].vertices) ids[p].push_back(builder.intern(v));
  builder.insert_pending();
  for (const auto& poly : ids)
    for (std::size_t i = 0; i < poly.size(); ++i) builder.insert_constraint(poly[i], poly[(i + 1) % poly.size()]);
  builder.restore_delaunay();
  return builder.finish(obstacles);
}

inline Triangulation triangulate(const Map2& map) { return triangulate(map.bounds, map.obstacles); }

/// Lowest-index free triangle containing p (boundary inclusive).
inline int locate_cell(const Triangulation& tri, Point2 p) {
  if (!is_finite(p) || !tri.bounds.contains(p)) throw Error(ErrorCode::InvalidInput, "point outside workspace bounds");
  for (std::size_t t = 0; t < tri.size(); ++t)
    if (tri.free[t] && tri.contains(t, p)) return static_cast<int>(t);
  throw Error(ErrorCode::PointInObstacle, "point lies inside an obstacle");
}

}  // namespace navcell
