#pragma once

// Score-modulated edge weights, Yen's k shortest corridors, and the two-phase
// decomposition-informed planning loop.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/error.hpp"
#include "navcell/eval.hpp"
#include "navcell/geom.hpp"

namespace navcell {

using Clock = std::chrono::steady_clock;

inline double modulated_weight(double d, double score, double beta) { return d * std::exp(-beta * score); }

/// Per-portal edge weights: centroid distance scaled by the portal score.
template <Vector V>
std::vector<double> edge_weights(const CellGraph<V>& g, std::span<const double> scores, double beta) {
  std::vector<double> w(g.num_portals());
  for (std::size_t p = 0; p < w.size(); ++p) {
    const double d = g.centroid_distance(g.portals[p].a, g.portals[p].b);
    w[p] = scores.empty() ? d : modulated_weight(d, scores[p], beta);
  }
  return w;
}

struct Corridor {
  std::vector<int> cells;
  double cost = 0.0;

  friend bool operator<(const Corridor& a, const Corridor& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.cells < b.cells;
  }
};

using Adjacency = std::vector<std::vector<Link>>;

inline double corridor_cost(const Adjacency& adj, std::span<const double> weight, std::span<const int> cells) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    const auto& row = adj[cells[i]];
    auto it = std::lower_bound(row.begin(), row.end(), cells[i + 1],
                               [](const Link& l, int key) { return l.cell < key; });
    c += weight[it->portal];
  }
  return c;
}

namespace detail {

/// Dijkstra with blocked nodes and portals. Equal distances are resolved
/// toward the lexicographically smaller cell sequence.
class ShortestPath {
 public:
  ShortestPath(const Adjacency& adj, std::span<const double> weight) : adj_(adj), weight_(weight) {
    dist_.resize(adj.size());
    pred_.resize(adj.size());
    done_.resize(adj.size());
  }

  std::optional<std::vector<int>> run(int source, int target, const std::vector<char>& blocked_node,
                                      const std::vector<char>& blocked_portal) {
    std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
    std::fill(pred_.begin(), pred_.end(), -1);
    std::fill(done_.begin(), done_.end(), 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done_[u] || d > dist_[u]) continue;
      done_[u] = 1;
      if (u == target) break;
      for (const Link& l : adj_[u]) {
        const int v = l.cell;
        if (done_[v] || blocked_node[v] || blocked_portal[l.portal]) continue;
        const double nd = d + weight_[l.portal];
        if (nd < dist_[v] || (nd == dist_[v] && prefers(u, pred_[v]))) {
          const bool improved = nd < dist_[v];
          dist_[v] = nd;
          pred_[v] = u;
          if (improved) heap.push({nd, v});
        }
      }
    }
    if (!done_[target]) return std::nullopt;
    std::vector<int> path;
    for (int c = target; c != -1; c = pred_[c]) path.push_back(c);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  std::vector<int> trace(int c) const {
    std::vector<int> p;
    for (; c != -1; c = pred_[c]) p.push_back(c);
    std::reverse(p.begin(), p.end());
    return p;
  }

  bool prefers(int u, int current) const { return current >= 0 && trace(u) < trace(current); }

  const Adjacency& adj_;
  std::span<const double> weight_;
  std::vector<double> dist_;
  std::vector<int> pred_;
  std::vector<char> done_;
};

}  // namespace detail

struct YenOptions {
  /// Portals with allowed[p] == 0 are removed; empty keeps all.
  std::vector<char> allowed;
  /// Stop enumerating further corridors past this point (at least one is returned).
  std::optional<Clock::time_point> deadline;
};

/// Up to k loopless shortest corridors in (cost, cell sequence) order.
inline std::vector<Corridor> yen_k_shortest(const Adjacency& adj, std::span<const double> weight, int source,
                                            int target, int k, const YenOptions& opt = {}) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be at least 1");
  const int n = static_cast<int>(adj.size());
  if (source < 0 || source >= n || target < 0 || target >= n) throw Error(ErrorCode::InvalidInput, "cell out of range");
  if (source == target) return {Corridor{{source}, 0.0}};

  std::vector<char> blocked_portal(weight.size(), 0);
  if (!opt.allowed.empty())
    for (std::size_t p = 0; p < weight.size(); ++p) blocked_portal[p] = opt.allowed[p] ? 0 : 1;
  const std::vector<char> base_blocked = blocked_portal;
  std::vector<char> blocked_node(n, 0);

  detail::ShortestPath sp(adj, weight);
  auto first = sp.run(source, target, blocked_node, blocked_portal);
  if (!first) throw Error(ErrorCode::NoCorridor, "goal cell unreachable");

  std::vector<Corridor> found{{*first, corridor_cost(adj, weight, *first)}};
  std::set<Corridor> candidates;
  std::set<std::vector<int>> seen{*first};

  auto portal_of = [&](int u, int v) {
    const auto& row = adj[u];
    auto it = std::lower_bound(row.begin(), row.end(), v, [](const Link& l, int key) { return l.cell < key; });
    return it->portal;
  };

  while (static_cast<int>(found.size()) < k) {
    if (opt.deadline && Clock::now() >= *opt.deadline) break;
    const std::vector<int> prev = found.back().cells;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const int spur = prev[i];
      blocked_portal = base_blocked;
      for (const Corridor& c : found)
        if (c.cells.size() > i + 1 && std::equal(prev.begin(), prev.begin() + i + 1, c.cells.begin()))
          blocked_portal[portal_of(c.cells[i], c.cells[i + 1])] = 1;
      std::fill(blocked_node.begin(), blocked_node.end(), 0);
      for (std::size_t j = 0; j < i; ++j) blocked_node[prev[j]] = 1;
      auto tail = sp.run(spur, target, blocked_node, blocked_portal);
      if (!tail) continue;
      std::vector<int> cells(prev.begin(), prev.begin() + i);
      cells.insert(cells.end(), tail->begin(), tail->end());
      if (!seen.insert(cells).second) continue;
      const double cost = corridor_cost(adj, weight, cells);
      candidates.insert({std::move(cells), cost});
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

template <Vector V>
std::vector<Corridor> yen_k_shortest(const CellGraph<V>& g, std::span<const double> weight, int k,
                                     const YenOptions& opt = {}) {
  return yen_k_shortest(g.adjacency, weight, g.start_cell, g.goal_cell, k, opt);
}

struct PlanOptions {
  int k = 8;
  double beta = 3.0;
  std::chrono::milliseconds timeout{20000};
};

struct PhaseCounters {
  int yen_calls = 0;
  int enumerated = 0;
  int evaluated = 0;
};

struct TracePoint {
  double time_ms = 0.0;
  double cost = 0.0;
  int phase = 0;
  int corridor_id = -1;
};

template <Vector V>
struct PlanResult {
  PathSolution<V> path;
  double cost = std::numeric_limits<double>::infinity();
  double time_to_first_ms = 0.0;
  double time_ms = 0.0;
  PhaseCounters phase1;
  PhaseCounters phase2;
  int phase2_iterations = 0;
  /// Best cost after each Phase-2 iteration.
  std::vector<double> iteration_cost;
  /// One entry per improvement of the incumbent.
  std::vector<TracePoint> trace;
  /// Every evaluated corridor, in evaluation order.
  std::vector<std::vector<int>> evaluated;
  bool timed_out = false;
  bool budget_exhausted = false;
  std::vector<std::string> warnings;
};

/// Minimum of |x - qs| + |x - qg| over every portal.
template <Vector V>
std::vector<double> portal_ellipse_sums(const CellGraph<V>& g) {
  std::vector<double> out(g.num_portals());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = ellipse_min_sum(g.portals[p].shape, g.qs, g.qg);
  return out;
}

/// Two-phase planner. `evaluate` maps a corridor to a path through it.
template <Vector V, typename Evaluate>
PlanResult<V> plan(const CellGraph<V>& g, std::span<const double> scores, const PlanOptions& opt, Evaluate&& evaluate) {
  if (opt.k < 1) throw Error(ErrorCode::InvalidInput, "k must be at least 1");
  if (!(opt.beta >= 0.0)) throw Error(ErrorCode::InvalidInput, "beta must be non-negative");
  const auto t0 = Clock::now();
  const auto deadline = t0 + opt.timeout;
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); };

  PlanResult<V> r;
  const std::vector<double> weight = edge_weights(g, scores, opt.beta);
  std::set<std::vector<int>> evaluated;
  int next_id = 0;

  auto consider = [&](const Corridor& c, int phase, PhaseCounters& counters) {
    PathSolution<V> path = evaluate(c.cells);
    evaluated.insert(c.cells);
    r.evaluated.push_back(c.cells);
    ++counters.evaluated;
    path.corridor_id = next_id++;
    path.phase = phase;
    if (path.length < r.cost) {
      if (r.trace.empty()) r.time_to_first_ms = elapsed_ms();
      r.cost = path.length;
      r.path = std::move(path);
      r.trace.push_back({elapsed_ms(), r.cost, phase, r.path.corridor_id});
      return true;
    }
    return false;
  };

  std::vector<Corridor> batch;
  try {
    batch = yen_k_shortest(g.adjacency, weight, g.start_cell, g.goal_cell, opt.k, {{}, deadline});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoCorridor) throw Error(ErrorCode::NoSolution, "start and goal are not connected");
    throw;
  }
  ++r.phase1.yen_calls;
  r.phase1.enumerated += static_cast<int>(batch.size());
  for (const Corridor& c : batch) {
    if (!r.trace.empty() && Clock::now() >= deadline) {
      r.timed_out = true;
      break;
    }
    consider(c, 1, r.phase1);
  }

  std::vector<double> sums;
  int budget = opt.k;
  while (!r.timed_out) {
    if (Clock::now() >= deadline) {
      r.timed_out = true;
      break;
    }
    if (sums.empty()) sums = portal_ellipse_sums(g);
    YenOptions yo;
    yo.deadline = deadline;
    yo.allowed.resize(g.num_portals());
    for (std::size_t p = 0; p < sums.size(); ++p) yo.allowed[p] = sums[p] <= r.cost + tol::kConvexMin ? 1 : 0;
    std::vector<Corridor> candidates;
    try {
      candidates = yen_k_shortest(g.adjacency, weight, g.start_cell, g.goal_cell, budget, yo);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCorridor) throw;
    }
    ++r.phase2.yen_calls;
    ++r.phase2_iterations;
    r.phase2.enumerated += static_cast<int>(candidates.size());
    bool improved = false;
    for (const Corridor& c : candidates) {
      if (evaluated.count(c.cells)) continue;
      if (Clock::now() >= deadline) {
        r.timed_out = true;
        break;
      }
      improved = consider(c, 2, r.phase2) || improved;
    }
    r.iteration_cost.push_back(r.cost);
    if (r.timed_out) break;
    if (!improved) {
      budget = std::min(2 * budget, 4 * opt.k);
      if (budget == 4 * opt.k) {
        r.budget_exhausted = true;
        break;
      }
    }
  }
  r.time_ms = elapsed_ms();
  return r;
}

inline PlanResult<Vec2> plan(const CellGraph2& g, std::span<const double> scores, const PlanOptions& opt) {
  return plan(g, scores, opt, [&](const std::vector<int>& c) { return evaluate_corridor(g, c); });
}

inline PlanResult<Vec3> plan(const CellGraph3& g, std::span<const double> scores, const PlanOptions& opt,
                             DpOptions dp = {}) {
  return plan(g, scores, opt, [&](const std::vector<int>& c) { return evaluate_corridor(g, c, dp); });
}

}  // namespace navcell
