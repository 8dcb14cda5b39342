#pragma once

// Cell adjacency graph over a decomposition, with GNN input features and a
// bound planning query.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>
#include <type_traits>
#include <vector>

#include "navcell/decomp2d.hpp"
#include "navcell/decomp3d.hpp"
#include "navcell/error.hpp"
#include "navcell/geom.hpp"

namespace navcell {

template <Vector V>
struct GraphTraits;

template <>
struct GraphTraits<Vec2> {
  static constexpr int kDim = 2;
  static constexpr int kNodeFeatures = 11;
  static constexpr int kEdgeFeatures = 9;
  static constexpr std::string_view kFeatureVersion = "navcell-2d-v1";
  using Bounds = Rect2;
  using CellShape = std::array<Point2, 3>;
  using PortalShape = Segment2;
};

template <>
struct GraphTraits<Vec3> {
  static constexpr int kDim = 3;
  static constexpr int kNodeFeatures = 14;
  static constexpr int kEdgeFeatures = 13;
  static constexpr std::string_view kFeatureVersion = "navcell-3d-v1";
  using Bounds = Aabb3;
  using CellShape = Aabb3;
  using PortalShape = FaceRect3;
};

/// Adjacency entry: neighbor cell and the portal leading to it.
struct Link {
  int cell;
  int portal;
};

template <Vector V>
struct CellGraph {
  using Traits = GraphTraits<V>;
  using Adjacent = Link;

  struct Cell {
    typename Traits::CellShape shape;
    V centroid;
    double measure = 0.0;
    double aspect = 1.0;
    double clearance = 0.0;
    /// Index in the source decomposition (triangle id in 2D).
    int source = -1;
    /// Obstacle and workspace-boundary edges of the cell (2D only).
    std::vector<Segment<V>> walls;
  };

  struct Portal {
    int a = -1;  // a < b
    int b = -1;
    /// Canonical direction: src has the lexicographically smaller centroid.
    int src = -1;
    int dst = -1;
    /// 2D segments run from the lexicographically smaller endpoint.
    typename Traits::PortalShape shape;
    V midpoint;
    double size = 0.0;
    double clearance = 0.0;
  };

  typename Traits::Bounds bounds;
  double diagonal = 1.0;
  std::vector<Cell> cells;
  std::vector<Portal> portals;
  /// Sorted by neighbor id.
  std::vector<std::vector<Adjacent>> adjacency;
  /// Row 2p is portal p in canonical direction, row 2p+1 the reverse.
  Eigen::MatrixXd node_features;
  Eigen::MatrixXd edge_features;
  V qs;
  V qg;
  int start_cell = -1;
  int goal_cell = -1;

  static constexpr int dimension() { return Traits::kDim; }
  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_portals() const { return portals.size(); }
  int degree(int c) const { return static_cast<int>(adjacency[c].size()); }

  int portal_between(int u, int v) const {
    const auto& adj = adjacency[u];
    auto it = std::lower_bound(adj.begin(), adj.end(), v, [](const Adjacent& x, int key) { return x.cell < key; });
    return it != adj.end() && it->cell == v ? it->portal : -1;
  }

  /// Directed edge list, each portal twice.
  std::vector<std::pair<int, int>> directed_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(2 * portals.size());
    for (const Portal& p : portals) {
      out.push_back({p.src, p.dst});
      out.push_back({p.dst, p.src});
    }
    return out;
  }

  double centroid_distance(int u, int v) const { return distance(cells[u].centroid, cells[v].centroid); }
};

using CellGraph2 = CellGraph<Vec2>;
using CellGraph3 = CellGraph<Vec3>;

/// Distance from p to the nearest obstacle or workspace boundary.
inline double clearance(Point2 p, const std::vector<SimplePolygon>& obstacles, const Rect2& bounds) {
  double d = std::min({p.x - bounds.min.x, bounds.max.x - p.x, p.y - bounds.min.y, bounds.max.y - p.y});
  d = std::max(d, 0.0);
  for (const auto& o : obstacles) d = std::min(d, point_polygon_boundary_distance(p, o));
  return d;
}

inline double clearance(Point3 p, const std::vector<Aabb3>& obstacles, const Aabb3& bounds) {
  double d = point_box_boundary_distance_inside(p, bounds);
  for (const auto& o : obstacles) d = std::min(d, point_box_boundary_distance(p, o));
  return d;
}

namespace detail {

inline double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

template <Vector V>
V normalized_position(V p, V origin, double diag) {
  return (p - origin) / diag;
}

template <Vector V>
void finish_graph(CellGraph<V>& g) {
  using Traits = GraphTraits<V>;
  const double diag = g.diagonal;
  const V origin = g.bounds.min;

  std::sort(g.portals.begin(), g.portals.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  g.adjacency.assign(g.cells.size(), {});
  for (int p = 0; p < static_cast<int>(g.portals.size()); ++p) {
    auto& portal = g.portals[p];
    const bool a_first = g.cells[portal.a].centroid <= g.cells[portal.b].centroid;
    portal.src = a_first ? portal.a : portal.b;
    portal.dst = a_first ? portal.b : portal.a;
    g.adjacency[portal.a].push_back({portal.b, p});
    g.adjacency[portal.b].push_back({portal.a, p});
  }
  for (auto& adj : g.adjacency)
    std::sort(adj.begin(), adj.end(), [](const auto& x, const auto& y) { return x.cell < y.cell; });

  auto perp = [&](V p) { return point_line_distance(p, g.qs, g.qg); };

  const int n = static_cast<int>(g.cells.size());
  g.node_features.resize(n, Traits::kNodeFeatures);
  for (int i = 0; i < n; ++i) {
    const auto& c = g.cells[i];
    const V z = normalized_position(c.centroid, origin, diag);
    auto row = g.node_features.row(i);
    int k = 0;
    row(k++) = c.measure / std::pow(diag, Traits::kDim);
    for (std::size_t a = 0; a < V::size(); ++a) row(k++) = z[a];
    row(k++) = distance(c.centroid, g.qs) / diag;
    row(k++) = distance(c.centroid, g.qg) / diag;
    row(k++) = perp(c.centroid) / diag;
    row(k++) = c.aspect;
    row(k++) = i == g.start_cell ? 1.0 : 0.0;
    row(k++) = i == g.goal_cell ? 1.0 : 0.0;
    row(k++) = g.degree(i);
    row(k++) = c.clearance / diag;
    if constexpr (Traits::kDim == 3) {
      double lo = c.shape.extent(0), hi = lo;
      for (std::size_t a = 1; a < 3; ++a) {
        lo = std::min(lo, c.shape.extent(a));
        hi = std::max(hi, c.shape.extent(a));
      }
      row(k++) = lo / diag;
      row(k++) = hi / diag;
    }
  }

  const double sg_angle = std::atan2(g.qg[1] - g.qs[1], g.qg[0] - g.qs[0]);
  const int m = static_cast<int>(g.portals.size());
  g.edge_features.resize(2 * m, Traits::kEdgeFeatures);
  for (int p = 0; p < m; ++p) {
    const auto& portal = g.portals[p];
    const V mid = normalized_position(portal.midpoint, origin, diag);
    Eigen::VectorXd e(Traits::kEdgeFeatures);
    int k = 0;
    e(k++) = portal.size / std::pow(diag, Traits::kDim - 1);
    for (std::size_t a = 0; a < V::size(); ++a) e(k++) = mid[a];
    e(k++) = distance(portal.midpoint, g.qs) / diag;
    e(k++) = distance(portal.midpoint, g.qg) / diag;
    e(k++) = perp(portal.midpoint) / diag;
    if constexpr (Traits::kDim == 2) {
      const Vec2 dir = portal.shape.b - portal.shape.a;
      e(k++) = wrap_angle(std::atan2(dir.y, dir.x) - sg_angle);
      e(k++) = g.centroid_distance(portal.a, portal.b) / diag;
      e(k++) = portal.clearance / diag;
    } else {
      e(k++) = g.centroid_distance(portal.a, portal.b) / diag;
      e(k++) = portal.clearance / diag;
      for (int a = 0; a < 3; ++a) e(k++) = portal.shape.normal_axis == a ? 1.0 : 0.0;
      e(k++) = portal.shape.min_dimension() / diag;
    }
    g.edge_features.row(2 * p) = e.transpose();
    g.edge_features.row(2 * p + 1) = e.transpose();
  }
}

}  // namespace detail

/// Lowest-index closed box containing p.
inline int locate_cell(const SlabDecomposition& d, Point3 p) {
  if (!is_finite(p) || !d.bounds.contains(p)) throw Error(ErrorCode::InvalidInput, "point outside workspace bounds");
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.cells[i].contains(p)) return static_cast<int>(i);
  throw Error(ErrorCode::PointInObstacle, "point lies inside an obstacle");
}

namespace detail {

template <typename Decomposition, Vector V>
int bind_point(const Decomposition& d, V p, ErrorCode in_obstacle, const char* what) {
  try {
    return locate_cell(d, p);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PointInObstacle) throw Error(in_obstacle, std::string(what) + " lies inside an obstacle");
    throw;
  }
}

}  // namespace detail

inline CellGraph2 build_graph(const Triangulation& tri, Point2 qs, Point2 qg) {
  const int start_tri = detail::bind_point(tri, qs, ErrorCode::StartInObstacle, "start");
  const int goal_tri = detail::bind_point(tri, qg, ErrorCode::GoalInObstacle, "goal");

  CellGraph2 g;
  g.bounds = tri.bounds;
  g.diagonal = tri.bounds.diagonal();
  g.qs = qs;
  g.qg = qg;
  std::vector<int> node_of(tri.size(), -1);
  for (std::size_t t = 0; t < tri.size(); ++t) {
    if (!tri.free[t]) continue;
    node_of[t] = static_cast<int>(g.cells.size());
    CellGraph2::Cell c;
    c.shape = {tri.corner(t, 0), tri.corner(t, 1), tri.corner(t, 2)};
    c.centroid = tri.centroid(t);
    c.measure = tri.area(t);
    double longest = 0.0;
    for (int e = 0; e < 3; ++e) longest = std::max(longest, tri.edge(t, e).length());
    c.aspect = std::max(1.0, std::sqrt(3.0) * longest * longest / (4.0 * c.measure));
    c.clearance = clearance(c.centroid, tri.obstacles, tri.bounds);
    c.source = static_cast<int>(t);
    for (int e = 0; e < 3; ++e) {
      const int nb = tri.neighbors[t][e];
      if (nb < 0 || !tri.free[nb]) c.walls.push_back(tri.edge(t, e));
    }
    g.cells.push_back(std::move(c));
  }
  for (std::size_t t = 0; t < tri.size(); ++t) {
    if (!tri.free[t]) continue;
    for (int e = 0; e < 3; ++e) {
      const int nb = tri.neighbors[t][e];
      if (nb < 0 || !tri.free[nb] || nb < static_cast<int>(t)) continue;
      CellGraph2::Portal p;
      p.a = node_of[t];
      p.b = node_of[nb];
      Segment2 s = tri.edge(t, e);
      if (s.b < s.a) std::swap(s.a, s.b);
      p.shape = s;
      p.midpoint = s.midpoint();
      p.size = s.length();
      p.clearance = clearance(p.midpoint, tri.obstacles, tri.bounds);
      g.portals.push_back(p);
    }
  }
  g.start_cell = node_of[start_tri];
  g.goal_cell = node_of[goal_tri];
  detail::finish_graph(g);
  return g;
}

inline CellGraph3 build_graph(const SlabDecomposition& d, Point3 qs, Point3 qg) {
  CellGraph3 g;
  g.start_cell = detail::bind_point(d, qs, ErrorCode::StartInObstacle, "start");
  g.goal_cell = detail::bind_point(d, qg, ErrorCode::GoalInObstacle, "goal");
  g.bounds = d.bounds;
  g.diagonal = d.bounds.diagonal();
  g.qs = qs;
  g.qg = qg;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CellGraph3::Cell c;
    c.shape = d.cells[i];
    c.centroid = c.shape.center();
    c.measure = c.shape.volume();
    double lo = c.shape.extent(0), hi = lo;
    for (std::size_t a = 1; a < 3; ++a) {
      lo = std::min(lo, c.shape.extent(a));
      hi = std::max(hi, c.shape.extent(a));
    }
    c.aspect = hi / lo;
    c.clearance = clearance(c.centroid, d.obstacles, d.bounds);
    c.source = static_cast<int>(i);
    g.cells.push_back(std::move(c));
  }
  for (const FacePortal& fp : extract_portals(d)) {
    CellGraph3::Portal p;
    p.a = fp.a;
    p.b = fp.b;
    p.shape = fp.face;
    p.midpoint = fp.face.center();
    p.size = fp.face.area();
    p.clearance = clearance(p.midpoint, d.obstacles, d.bounds);
    g.portals.push_back(p);
  }
  detail::finish_graph(g);
  return g;
}

}  // namespace navcell
