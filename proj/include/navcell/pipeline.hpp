#pragma once

// Decompose, build the cell graph, score portals and plan, with wall-clock accounting.

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "navcell/cellgraph.hpp"
#include "navcell/decomp2d.hpp"
#include "navcell/decomp3d.hpp"
#include "navcell/gnn.hpp"
#include "navcell/search.hpp"

namespace navcell {

struct PipelineOptions {
  PlanOptions plan;
  DpOptions dp;
  /// Ignore the model and plan on centroid distances.
  bool unguided = false;
  std::shared_ptr<const GnnWeights> model;
};

template <Vector V>
struct PipelineResult {
  CellGraph<V> graph;
  std::vector<double> scores;
  PlanResult<V> plan;
  double decompose_ms = 0.0;
  double graph_ms = 0.0;
  double score_ms = 0.0;
};

namespace detail {

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Scores from the model; a numerical fault degrades to all-zero scores with a warning.
template <Vector V>
std::vector<double> pipeline_scores(const CellGraph<V>& g, const PipelineOptions& opt, std::vector<std::string>& warnings) {
  if (opt.unguided || !opt.model) return {};
  try {
    return score_portals(g, *opt.model);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonFiniteActivation) throw;
    warnings.push_back(std::string("scores fell back to 0: ") + e.what());
    return std::vector<double>(g.num_portals(), 0.0);
  }
}

template <Vector V, typename Plan>
PipelineResult<V> finish_pipeline(CellGraph<V> g, Clock::time_point t0, double decompose_ms, double graph_ms,
                                  const PipelineOptions& opt, Plan&& run) {
  PipelineResult<V> out;
  out.decompose_ms = decompose_ms;
  out.graph_ms = graph_ms;
  std::vector<std::string> warnings;
  const auto ts = Clock::now();
  out.scores = pipeline_scores(g, opt, warnings);
  out.score_ms = elapsed_ms(ts);
  const double overhead = elapsed_ms(t0);
  out.plan = run(g, out.scores);
  out.plan.time_to_first_ms += overhead;
  out.plan.time_ms += overhead;
  for (auto& tp : out.plan.trace) tp.time_ms += overhead;
  out.plan.warnings.insert(out.plan.warnings.begin(), warnings.begin(), warnings.end());
  out.graph = std::move(g);
  return out;
}

}  // namespace detail

inline PipelineResult<Vec2> run_pipeline(const Map2& map, Point2 qs, Point2 qg, const PipelineOptions& opt = {}) {
  const auto t0 = Clock::now();
  const Triangulation tri = triangulate(map);
  const double decompose_ms = detail::elapsed_ms(t0);
  const auto tg = Clock::now();
  CellGraph2 g = build_graph(tri, qs, qg);
  if (opt.model && !opt.unguided) check_compatible(*opt.model, g);
  const double graph_ms = detail::elapsed_ms(tg);
  return detail::finish_pipeline(std::move(g), t0, decompose_ms, graph_ms, opt,
                                 [&](const CellGraph2& gr, const std::vector<double>& s) { return plan(gr, s, opt.plan); });
}

inline PipelineResult<Vec3> run_pipeline(const Map3& map, Point3 qs, Point3 qg, const PipelineOptions& opt = {}) {
  const auto t0 = Clock::now();
  const SlabDecomposition d = slab_decompose(map);
  const double decompose_ms = detail::elapsed_ms(t0);
  const auto tg = Clock::now();
  CellGraph3 g = build_graph(d, qs, qg);
  if (opt.model && !opt.unguided) check_compatible(*opt.model, g);
  const double graph_ms = detail::elapsed_ms(tg);
  return detail::finish_pipeline(
      std::move(g), t0, decompose_ms, graph_ms, opt,
      [&](const CellGraph3& gr, const std::vector<double>& s) { return plan(gr, s, opt.plan, opt.dp); });
}

}  // namespace navcell
