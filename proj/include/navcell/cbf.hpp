#pragma once

// Guarded execution of a 2D corridor path for a disk robot.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/error.hpp"
#include "navcell/eval.hpp"

namespace navcell {

struct BarrierConfig {
  double r = 0.0;
  double gamma = 1.0;
  double dt = 0.01;
  /// Nominal speed in workspace diagonals per second.
  double v_nom = 1.0;
  /// 0 picks a bound from the path length.
  long max_steps = 0;
  int max_constraints = 4;
};

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  /// Smallest barrier value over the walls considered at this pose.
  double h = std::numeric_limits<double>::infinity();
  int constraints = 0;
  int active = 0;
  bool clamped = false;
  int cell = -1;
};

struct Intervention {
  long step = 0;
  double t = 0.0;
  int cell = -1;
  double v_nominal = 0.0;
  double v = 0.0;
  double h = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Intervention> interventions;
  bool reached = false;
  double min_h = std::numeric_limits<double>::infinity();
  int max_active = 0;
};

inline double barrier_value(Point2 q, const Segment2& wall, double r) { return point_segment_distance(q, wall) - r; }

namespace detail {

inline bool triangle_contains(const std::array<Point2, 3>& t, Point2 p, double eps) {
  for (int i = 0; i < 3; ++i) {
    const Point2 a = t[i], b = t[(i + 1) % 3];
    const Point2 e = b - a;
    const double len = norm(e);
    const double side = (e.x * (p.y - a.y) - e.y * (p.x - a.x)) / len;
    if (side < -eps) return false;
  }
  return true;
}

struct WallCandidate {
  Segment2 wall;
  double h;
};

/// Walls of the current cell, its portal neighbours, and every cell reachable through portals within `horizon` of q.
inline std::vector<WallCandidate> nearest_walls(const CellGraph2& g, int cell, Point2 q, double r, double horizon,
                                                int limit) {
  std::vector<WallCandidate> out;
  std::vector<int> visited{cell};
  for (std::size_t i = 0; i < visited.size(); ++i) {
    const int c = visited[i];
    for (const Segment2& w : g.cells[c].walls) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const WallCandidate& x) {
        return (x.wall.a == w.a && x.wall.b == w.b) || (x.wall.a == w.b && x.wall.b == w.a);
      });
      if (!seen) out.push_back({w, barrier_value(q, w, r)});
    }
    for (const auto& link : g.adjacency[c]) {
      if (std::find(visited.begin(), visited.end(), link.cell) != visited.end()) continue;
      if (c == cell || point_segment_distance(q, g.portals[link.portal].shape) <= horizon) visited.push_back(link.cell);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const WallCandidate& a, const WallCandidate& b) { return a.h < b.h; });
  if (static_cast<int>(out.size()) > limit) out.resize(limit);
  return out;
}

}  // namespace detail

/// Tracks the polyline at nominal speed; with r > 0 clamps speed so no nearby wall is approached faster than gamma*h.
inline Trajectory execute_guarded(const PathSolution2& path, const CellGraph2& g, const BarrierConfig& cfg) {
  if (!(cfg.r >= 0.0) || !(cfg.gamma > 0.0) || !(cfg.dt > 0.0) || !(cfg.v_nom > 0.0) || cfg.gamma * cfg.dt > 1.0 ||
      cfg.max_constraints < 1)
    throw Error(ErrorCode::InvalidInput, "invalid barrier configuration");
  if (path.waypoints.empty() || path.cells.empty()) throw Error(ErrorCode::MalformedCorridor, "empty path");
  for (int c : path.cells)
    if (c < 0 || c >= static_cast<int>(g.num_cells())) throw Error(ErrorCode::MalformedCorridor, "cell id out of range");

  const bool guarded = cfg.r > 0.0;
  const double speed = cfg.v_nom * g.diagonal;
  const double eps = 1e-9 * g.diagonal;
  const double horizon = cfg.r + speed * cfg.dt + eps;
  const auto& wp = path.waypoints;
  const long max_steps =
      cfg.max_steps > 0 ? cfg.max_steps : static_cast<long>(std::ceil(20.0 * polyline_length(wp) / (speed * cfg.dt))) + 1000;

  Trajectory traj;
  Point2 q = wp.front();
  std::size_t seg = 0;
  int idx = 0;
  double t = 0.0;

  auto advance_cell = [&] {
    for (int j = static_cast<int>(path.cells.size()) - 1; j > idx; --j)
      if (detail::triangle_contains(g.cells[path.cells[j]].shape, q, eps)) {
        idx = j;
        break;
      }
  };
  auto heading = [&]() -> Point2 {
    while (seg + 1 < wp.size() && q == wp[seg + 1]) ++seg;
    if (seg + 1 >= wp.size()) return {0.0, 0.0};
    const Point2 d = wp[seg + 1] - q;
    return d / norm(d);
  };

  for (long step = 0;; ++step) {
    advance_cell();
    const Point2 u = heading();
    const bool done = seg + 1 >= wp.size();
    TrajectorySample s;
    s.t = t;
    s.x = q.x;
    s.y = q.y;
    s.theta = done ? (traj.samples.empty() ? 0.0 : traj.samples.back().theta) : std::atan2(u.y, u.x);
    s.cell = path.cells[idx];
    double v = done ? 0.0 : speed;
    if (guarded) {
      const auto walls = detail::nearest_walls(g, path.cells[idx], q, cfg.r, horizon, cfg.max_constraints);
      s.constraints = static_cast<int>(walls.size());
      for (const auto& w : walls) {
        s.h = std::min(s.h, w.h);
        if (step == 0 && w.h < 0.0) throw Error(ErrorCode::InfeasibleStart, "robot starts inside a wall margin");
        const Point2 c = closest_point_on_segment(q, w.wall);
        const double d = distance(q, c);
        if (d <= 0.0) continue;
        const double a = -dot((q - c) / d, u);
        if (a <= 0.0) continue;
        ++s.active;
        const double limit = std::max(0.0, cfg.gamma * w.h / a);
        if (limit < v) {
          v = limit;
          s.clamped = true;
        }
      }
      traj.min_h = std::min(traj.min_h, s.h);
      traj.max_active = std::max(traj.max_active, s.active);
      if (s.clamped) traj.interventions.push_back({step, t, s.cell, speed, v, s.h});
    }
    s.v = v;
    traj.samples.push_back(s);
    if (done) {
      traj.reached = true;
      break;
    }
    if (step >= max_steps) break;
    const double remaining = distance(q, wp[seg + 1]);
    const double ds = v * cfg.dt;
    if (ds >= remaining) {
      q = wp[seg + 1];
      ++seg;
    } else {
      q = q + u * ds;
    }
    t += cfg.dt;
  }
  return traj;
}

}  // namespace navcell
