#pragma once

// Corridor evaluators: exact funnel string-pulling in 2D and layered portal
// sampling DP with Gaussian refinement in 3D.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/error.hpp"
#include "navcell/geom.hpp"

namespace navcell {

template <Vector V>
struct PathSolution {
  std::vector<V> waypoints;
  double length = 0.0;
  std::vector<int> cells;
  int corridor_id = -1;
  int phase = 0;
  int dp_samples = 0;
  int refinement_rounds = 0;
};

using PathSolution2 = PathSolution<Vec2>;
using PathSolution3 = PathSolution<Vec3>;

template <Vector V>
double polyline_length(const std::vector<V>& pts) {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) s += distance(pts[i - 1], pts[i]);
  return s;
}

/// Portal seen from the direction of travel.
struct Gate {
  Point2 left;
  Point2 right;
};

/// Shortest path from qs to qg threading the gates in order.
inline PathSolution2 funnel(std::span<const Gate> gates, Point2 qs, Point2 qg) {
  if (!is_finite(qs) || !is_finite(qg)) throw Error(ErrorCode::MalformedCorridor, "non-finite query");
  std::vector<Gate> g;
  g.reserve(gates.size() + 2);
  g.push_back({qs, qs});
  for (const Gate& gate : gates) {
    if (!is_finite(gate.left) || !is_finite(gate.right) || gate.left == gate.right)
      throw Error(ErrorCode::MalformedCorridor, "degenerate portal");
    g.push_back(gate);
  }
  g.push_back({qg, qg});

  PathSolution2 out;
  out.waypoints.push_back(qs);
  Point2 apex = qs, left = qs, right = qs;
  std::size_t apex_i = 0, left_i = 0, right_i = 0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const Point2 l = g[i].left, r = g[i].right;
    if (orient2d(apex, right, r) >= 0) {
      if (apex == right || orient2d(apex, left, r) <= 0) {
        right = r;
        right_i = i;
      } else {
        apex = left;
        apex_i = left_i;
        if (out.waypoints.back() != apex) out.waypoints.push_back(apex);
        right = left = apex;
        right_i = left_i = apex_i;
        i = apex_i;
        continue;
      }
    }
    if (orient2d(apex, left, l) <= 0) {
      if (apex == left || orient2d(apex, right, l) >= 0) {
        left = l;
        left_i = i;
      } else {
        apex = right;
        apex_i = right_i;
        if (out.waypoints.back() != apex) out.waypoints.push_back(apex);
        right = left = apex;
        right_i = left_i = apex_i;
        i = apex_i;
        continue;
      }
    }
  }
  if (out.waypoints.back() != qg || out.waypoints.size() == 1) out.waypoints.push_back(qg);
  out.length = polyline_length(out.waypoints);
  return out;
}

/// Oriented portals along a 2D corridor.
inline std::vector<Gate> corridor_gates(const CellGraph2& g, std::span<const int> corridor) {
  if (corridor.empty()) throw Error(ErrorCode::MalformedCorridor, "empty corridor");
  std::vector<Gate> gates;
  gates.reserve(corridor.size() - 1);
  for (std::size_t k = 0; k + 1 < corridor.size(); ++k) {
    const int u = corridor[k], v = corridor[k + 1];
    const int p = g.portal_between(u, v);
    if (p < 0) throw Error(ErrorCode::MalformedCorridor, "consecutive cells do not share a portal");
    const Segment2& s = g.portals[p].shape;
    if (orient2d(s.a, s.b, g.cells[u].centroid) > 0) {
      gates.push_back({s.b, s.a});
    } else {
      gates.push_back({s.a, s.b});
    }
  }
  return gates;
}

inline PathSolution2 evaluate_corridor(const CellGraph2& g, std::span<const int> corridor) {
  auto out = funnel(corridor_gates(g, corridor), g.qs, g.qg);
  out.cells.assign(corridor.begin(), corridor.end());
  return out;
}

struct DpOptions {
  int samples = 16;  // per portal, a perfect square
  int rounds = 3;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

namespace detail {

inline int grid_side(int samples) {
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples))));
  if (samples < 4 || m * m != samples) throw Error(ErrorCode::InvalidInput, "sample count must be a perfect square >= 4");
  return m;
}

/// Forward DP through layers of candidate points; returns the chosen index per layer.
inline double layered_dp(const std::vector<std::vector<Point3>>& layers, Point3 qs, Point3 qg,
                         std::vector<std::size_t>& choice) {
  const std::size_t L = layers.size();
  std::vector<std::vector<double>> cost(L);
  std::vector<std::vector<std::size_t>> back(L);
  for (std::size_t k = 0; k < L; ++k) {
    cost[k].assign(layers[k].size(), std::numeric_limits<double>::infinity());
    back[k].assign(layers[k].size(), 0);
    for (std::size_t j = 0; j < layers[k].size(); ++j) {
      if (k == 0) {
        cost[k][j] = distance(qs, layers[k][j]);
        continue;
      }
      for (std::size_t i = 0; i < layers[k - 1].size(); ++i) {
        const double c = cost[k - 1][i] + distance(layers[k - 1][i], layers[k][j]);
        if (c < cost[k][j]) {
          cost[k][j] = c;
          back[k][j] = i;
        }
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < layers[L - 1].size(); ++j) {
    const double c = cost[L - 1][j] + distance(layers[L - 1][j], qg);
    if (c < best) {
      best = c;
      arg = j;
    }
  }
  choice.assign(L, 0);
  for (std::size_t k = L; k-- > 0;) {
    choice[k] = arg;
    arg = back[k][arg];
  }
  return best;
}

}  // namespace detail

/// Grid points t_i = i/m on both in-plane axes of the face.
inline std::vector<Point3> face_grid(const FaceRect3& f, int side) {
  const auto t = f.tangent_axes();
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(side) * side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      Point3 p = f.box.min;
      p[t[0]] += f.box.extent(t[0]) * i / side;
      p[t[1]] += f.box.extent(t[1]) * j / side;
      out.push_back(p);
    }
  return out;
}

inline PathSolution3 dp_evaluate_3d(std::span<const FaceRect3> faces, Point3 qs, Point3 qg, DpOptions opt = {}) {
  const int side = detail::grid_side(opt.samples);
  if (opt.rounds < 0) throw Error(ErrorCode::InvalidInput, "negative refinement rounds");
  if (!is_finite(qs) || !is_finite(qg)) throw Error(ErrorCode::MalformedCorridor, "non-finite query");
  for (const auto& f : faces)
    if (!is_finite(f.box.min) || !is_finite(f.box.max) || !(f.area() > 0.0))
      throw Error(ErrorCode::MalformedCorridor, "degenerate portal face");

  PathSolution3 out;
  out.dp_samples = opt.samples;
  if (faces.empty()) {
    out.waypoints = {qs, qg};
    out.length = distance(qs, qg);
    return out;
  }
  std::vector<std::vector<Point3>> layers;
  layers.reserve(faces.size());
  for (const auto& f : faces) layers.push_back(face_grid(f, side));
  std::vector<std::size_t> choice;
  double best = detail::layered_dp(layers, qs, qg, choice);
  std::vector<Point3> crossing(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) crossing[k] = layers[k][choice[k]];

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int round = 0; round < opt.rounds; ++round) {
    for (std::size_t k = 0; k < faces.size(); ++k) {
      const auto& f = faces[k];
      const auto t = f.tangent_axes();
      const double sigma = f.min_dimension() / 4.0 * std::ldexp(1.0, -round);
      auto& layer = layers[k];
      layer.assign(1, crossing[k]);
      for (int s = 1; s < opt.samples; ++s) {
        Point3 p = crossing[k];
        for (int a : t) p[a] = std::clamp(p[a] + sigma * normal(rng), f.box.min[a], f.box.max[a]);
        layer.push_back(p);
      }
    }
    const double c = detail::layered_dp(layers, qs, qg, choice);
    if (c <= best) {
      best = c;
      for (std::size_t k = 0; k < faces.size(); ++k) crossing[k] = layers[k][choice[k]];
    }
    ++out.refinement_rounds;
  }
  out.waypoints.reserve(faces.size() + 2);
  out.waypoints.push_back(qs);
  for (const auto& p : crossing) out.waypoints.push_back(p);
  out.waypoints.push_back(qg);
  out.length = polyline_length(out.waypoints);
  return out;
}

inline std::vector<FaceRect3> corridor_faces(const CellGraph3& g, std::span<const int> corridor) {
  if (corridor.empty()) throw Error(ErrorCode::MalformedCorridor, "empty corridor");
  std::vector<FaceRect3> faces;
  faces.reserve(corridor.size() - 1);
  for (std::size_t k = 0; k + 1 < corridor.size(); ++k) {
    const int p = g.portal_between(corridor[k], corridor[k + 1]);
    if (p < 0) throw Error(ErrorCode::MalformedCorridor, "consecutive cells do not share a portal");
    faces.push_back(g.portals[p].shape);
  }
  return faces;
}

inline PathSolution3 evaluate_corridor(const CellGraph3& g, std::span<const int> corridor, DpOptions opt = {}) {
  auto out = dp_evaluate_3d(corridor_faces(g, corridor), g.qs, g.qg, opt);
  out.cells.assign(corridor.begin(), corridor.end());
  return out;
}

}  // namespace navcell
