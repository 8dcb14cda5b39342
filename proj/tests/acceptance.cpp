// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "golden_util.hpp"
#include "oracles.hpp"
#include "weights_util.hpp"

using namespace navcell;
using namespace oracle;

namespace {

using Ms = std::chrono::duration<double, std::milli>;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Convergence bookkeeping shared by every planning run below.
struct ConvergenceTally {
  int runs = 0;
  int trace_violations = 0;
  int duplicate_evaluations = 0;
  int not_exhausted = 0;

  template <Vector V>
  void add(const PlanResult<V>& r) {
    ++runs;
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      if (!(r.trace[i].cost < r.trace[i - 1].cost) || r.trace[i].time_ms < r.trace[i - 1].time_ms) ++trace_violations;
    if (r.trace.empty()) ++trace_violations;
    const std::set<std::vector<int>> unique(r.evaluated.begin(), r.evaluated.end());
    if (unique.size() != r.evaluated.size()) ++duplicate_evaluations;
    if (!r.budget_exhausted || r.timed_out) ++not_exhausted;
  }
};

ConvergenceTally convergence;

void yen_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240501);
  int mismatches = 0, corridors = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const int k = 1 + static_cast<int>(rng() % 6);
    const auto g = random_graph(rng, n, 0.3 + 0.4 * static_cast<double>(rng() % 1000) / 1000.0);
    const auto all = brute_force(g, 0, n - 1);
    if (all.empty()) {
      try {
        yen_k_shortest(g.adj, g.weight, 0, n - 1, k);
        ++mismatches;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCorridor) ++mismatches;
      }
      continue;
    }
    const auto got = yen_k_shortest(g.adj, g.weight, 0, n - 1, k);
    if (got.size() != std::min<std::size_t>(k, all.size())) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      ++corridors;
      if (got[i].cost != all[i].cost) ++mismatches;
    }
  }
  const double s = Ms(std::chrono::steady_clock::now() - t0).count() / 1000.0;
  report(mismatches == 0 && s < 60.0, "yen_oracle_equivalence",
         format("500 graphs, %d corridors compared, %d mismatches, %.2f s", corridors, mismatches, s));
}

void funnel_optimality() {
  std::mt19937_64 rng(777);
  int checked = 0, above_dp = 0, below_line = 0;
  long violations = 0;
  double worst_gap = -INFINITY;
  while (checked < 300) {
    const Map2 map{{{0, 0}, {1, 1}}, random_rects(rng, 5 + static_cast<int>(rng() % 25))};
    const auto tri = triangulate(map);
    const auto frees = tri.free_triangles();
    const Point2 qs = tri.centroid(frees[rng() % frees.size()]);
    const Point2 qg = tri.centroid(frees[rng() % frees.size()]);
    const auto g = build_graph(tri, qs, qg);
    const auto corridor = bfs_corridor(g);
    if (corridor.empty()) continue;
    ++checked;
    const auto path = evaluate_corridor(g, corridor);
    const double dp = dp_oracle(corridor_gates(g, corridor), qs, qg, 64);
    worst_gap = std::max(worst_gap, path.length - dp);
    if (path.length > dp + 1e-4) ++above_dp;
    if (path.length < distance(qs, qg) - 1e-12) ++below_line;
    violations += post_validate(path, map, 200.0);
  }
  report(above_dp == 0 && below_line == 0 && violations == 0, "funnel_optimality",
         format("%d corridors, %d above dense DP+1e-4 (max length-DP %.3g), %d below straight line, %ld violations",
                checked, above_dp, worst_gap, below_line, violations));
}

void slab_conservation() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Aabb3 unit{{0, 0, 0}, {1, 1, 1}};
  int maps = 0, volume_bad = 0;
  long overlap = 0, sampled = 0, in_obstacle = 0;
  double worst = 0.0;
  while (maps < 100) {
    const auto obs = random_boxes(rng, 1 + static_cast<int>(rng() % 15));
    SlabDecomposition d;
    try {
      d = slab_decompose(unit, obs);
    } catch (const Error&) {
      continue;
    }
    ++maps;
    const double rel = std::abs(d.free_volume() + union_volume_grid(clipped(obs, unit)) - unit.volume()) / unit.volume();
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++volume_bad;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = i + 1; j < d.size(); ++j)
        if (overlap_volume(d.cells[i], d.cells[j]) > 0.0) ++overlap;
    for (int s = 0; s < 2000; ++s) {
      const Point3 p{u(rng), u(rng), u(rng)};
      int inside = 0;
      for (const auto& c : d.cells) inside += c.interior_contains(p, 0.0);
      if (inside > 1) ++overlap;
      if (inside == 1)
        for (const auto& o : obs) in_obstacle += o.interior_contains(p, 0.0);
      ++sampled;
    }
  }
  report(volume_bad == 0 && overlap == 0 && in_obstacle == 0, "slab_conservation",
         format("%d maps, worst relative volume error %.2e, %ld overlaps, %ld samples, %ld in obstacles", maps, worst,
                overlap, sampled, in_obstacle));
}

void completeness() {
  int runs = 0, solved = 0;
  long violations = 0;
  const std::vector<std::pair<std::string, int>> plan2 = {
      {"forest", 40}, {"labyrinth", 40}, {"bottleneck2d", 40}, {"multi_room", 40}, {"dense2d", 40}};
  const std::vector<std::pair<std::string, int>> plan3 = {
      {"bn_office3d", 13}, {"bn_maze3d", 13}, {"bn_layers3d", 12}, {"dense3d", 12}};
  const auto t0 = std::chrono::steady_clock::now();
  std::string failures_at;
  auto one = [&](const std::string& family, std::uint64_t seed) {
    const Scenario s = generate({.family = family, .seed = 1000 + seed});
    ++runs;
    try {
      if (s.dim == 2) {
        const auto r = run_pipeline(s.map2, s.start2(), s.goal2()).plan;
        convergence.add(r);
        solved += std::isfinite(r.cost);
        violations += post_validate(r.path, s.map2, 200.0);
      } else {
        const auto r = run_pipeline(s.map3, s.start3(), s.goal3()).plan;
        convergence.add(r);
        solved += std::isfinite(r.cost);
        violations += post_validate(r.path, s.map3, 200.0);
      }
    } catch (const Error& e) {
      failures_at += " " + family + "/" + std::to_string(seed) + "(" + e.what() + ")";
    }
  };
  for (const auto& [f, n] : plan2)
    for (int i = 0; i < n; ++i) one(f, i);
  const int runs2 = runs, solved2 = solved;
  for (const auto& [f, n] : plan3)
    for (int i = 0; i < n; ++i) one(f, i);
  const double s = Ms(std::chrono::steady_clock::now() - t0).count() / 1000.0;
  report(solved == runs && violations == 0, "completeness",
         format("2D %d/%d, 3D %d/%d solved, %ld post-validation violations, %.1f s", solved2, runs2, solved - solved2,
                runs - runs2, violations, s) +
             failures_at);
}

void bottleneck_speed() {
  std::vector<double> ttf;
  int solved = 0;
  std::size_t min_cells = SIZE_MAX;
  double min_gap = INFINITY, max_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = generate({.family = "bottleneck2d", .seed = 5000 + seed});
    min_gap = std::min(min_gap, s.door_width);
    max_gap = std::max(max_gap, s.door_width);
    try {
      const auto res = run_pipeline(s.map2, s.start2(), s.goal2());
      convergence.add(res.plan);
      min_cells = std::min(min_cells, res.graph.num_cells());
      if (std::isfinite(res.plan.cost) && post_validate(res.plan.path, s.map2, 200.0) == 0) {
        ++solved;
        ttf.push_back(res.plan.time_to_first_ms);
      }
    } catch (const Error&) {
    }
  }
  const double med = median(ttf);
  report(solved == 100 && med < 1000.0 && min_cells >= 500 && max_gap == 0.002 && min_gap == 0.002,
         "bottleneck_speed",
         format("100 instances, gap %.4g, >= %zu cells, %d solved, median time-to-first %.1f ms", min_gap, min_cells,
                solved, med));
}

void convergence_report() {
  report(convergence.runs > 0 && convergence.trace_violations == 0 && convergence.duplicate_evaluations == 0 &&
             convergence.not_exhausted == 0,
         "convergence",
         format("%d runs, %d trace violations, %d runs with repeated corridors, %d runs ending before 4k exhaustion",
                convergence.runs, convergence.trace_violations, convergence.duplicate_evaluations,
                convergence.not_exhausted));
}

std::string run_cli(const std::string& args, int& code) {
  const auto out = std::filesystem::temp_directory_path() / ("navcell_acc_" + std::to_string(::getpid()) + ".out");
  const std::string cmd = std::string(NAVCELL_CLI_PATH) + " " + args + " >" + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  std::filesystem::remove(out);
  return ss.str();
}

void graceful_degradation() {
  auto m2 = std::make_shared<const GnnWeights>(parse_weights(testutil::random_weights({.hidden = 16, .seed = 3})));
  auto m3 = std::make_shared<const GnnWeights>(parse_weights(testutil::random_weights(testutil::spec_3d(16, 4))));
  int compared = 0, differ = 0;
  PipelineOptions guided, unguided;
  guided.plan.beta = 0.0;
  unguided.unguided = true;
  for (const auto& f : scenario_families()) {
    for (std::uint64_t seed = 0; seed < (family_dimension(f) == 2 ? 6u : 2u); ++seed) {
      const Scenario s = generate({.family = f, .seed = 300 + seed});
      std::string a, b;
      if (s.dim == 2) {
        guided.model = m2;
        a = path_to_json(run_pipeline(s.map2, s.start2(), s.goal2(), guided).plan, true).dump();
        b = path_to_json(run_pipeline(s.map2, s.start2(), s.goal2(), unguided).plan, true).dump();
      } else {
        guided.model = m3;
        a = path_to_json(run_pipeline(s.map3, s.start3(), s.goal3(), guided).plan, true).dump();
        b = path_to_json(run_pipeline(s.map3, s.start3(), s.goal3(), unguided).plan, true).dump();
      }
      ++compared;
      differ += a != b;
    }
  }
  // The same check through the command-line entry point.
  const auto dir = std::filesystem::temp_directory_path();
  const auto model = dir / ("navcell_acc_model_" + std::to_string(::getpid()) + ".json");
  std::ofstream(model) << testutil::random_weights({.hidden = 16, .seed = 4}).dump();
  int cli_compared = 0, cli_differ = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Scenario s = generate({.family = "forest", .seed = 400 + seed});
    const auto map = dir / ("navcell_acc_map_" + std::to_string(::getpid()) + ".json");
    std::ofstream(map) << scenario_to_json(s).dump();
    const std::string q = " --map " + map.string() + " --start " + format("%.17g,%.17g", s.start[0], s.start[1]) +
                          " --goal " + format("%.17g,%.17g", s.goal[0], s.goal[1]);
    int ca = 0, cb = 0;
    const std::string a = run_cli("plan --deterministic --beta 0 --model " + model.string() + q, ca);
    const std::string b = run_cli("plan --deterministic --unguided" + q, cb);
    ++cli_compared;
    cli_differ += (a != b || ca != 0 || cb != 0 || a.empty());
    std::filesystem::remove(map);
  }
  std::filesystem::remove(model);
  report(differ == 0 && cli_differ == 0, "graceful_degradation",
         format("%d pipeline runs with %d differences, %d CLI runs with %d differences", compared, differ, cli_compared,
                cli_differ));
}

void gnn_parity() {
  const auto a = testutil::check_golden(std::string(NAVCELL_FIXTURE_DIR) + "/golden_2d.json");
  const auto b = testutil::check_golden(std::string(NAVCELL_FIXTURE_DIR) + "/golden_3d.json");
  report(a.score_error <= a.tolerance && b.score_error <= b.tolerance && a.feature_error <= 1e-12 &&
             b.feature_error <= 1e-12,
         "gnn_golden_parity",
         format("gcn2d %zu portals max error %.2e, gatv2_3d %zu portals max error %.2e, tolerance %.0e", a.portals,
                a.score_error, b.portals, b.score_error, a.tolerance));
}

void cbf_safety() {
  std::mt19937_64 rng(6061);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double min_h = INFINITY;
  int max_constraints = 0, max_active = 0, runs = 0, interventions = 0;
  int reached[2] = {0, 0};
  for (int trial = 0; trial < 50; ++trial) {
    // The first half crosses the door along its centre line, the second half uses random queries.
    const bool aligned = trial < 25;
    const double door = 0.03 + 0.05 * u(rng);
    const double r = 0.5 * door * (0.5 + 0.45 * u(rng));
    const double y0 = 0.2 + 0.6 * u(rng) - 0.5 * door;
    const Map2 map{{{0, 0}, {1, 1}}, {detail::box2(0.45, 0.0, 0.55, y0), detail::box2(0.45, y0 + door, 0.55, 1.0)}};
    Point2 qs{0.1 + 0.25 * u(rng), 0.1 + 0.8 * u(rng)};
    Point2 qg{0.65 + 0.25 * u(rng), 0.1 + 0.8 * u(rng)};
    if (aligned) qs.y = qg.y = y0 + 0.5 * door;
    const auto res = run_pipeline(map, qs, qg);
    const auto traj = execute_guarded(res.plan.path, res.graph, {.r = r});
    ++runs;
    reached[aligned ? 0 : 1] += traj.reached;
    interventions += static_cast<int>(traj.interventions.size());
    for (const auto& s : traj.samples) {
      min_h = std::min(min_h, true_barrier(map, {s.x, s.y}, r));
      max_constraints = std::max(max_constraints, s.constraints);
      max_active = std::max(max_active, s.active);
    }
  }
  report(min_h >= -1e-9 && max_constraints <= 4 && max_active <= 4, "cbf_safety",
         format("%d narrow-door runs, min h %.3e, max constraints %d, max active %d, %d interventions, "
                "goal reached %d/25 aligned and %d/25 random",
                runs, min_h, max_constraints, max_active, interventions, reached[0], reached[1]));
}

}  // namespace

int main() {
  try {
    yen_equivalence();
    funnel_optimality();
    slab_conservation();
    completeness();
    bottleneck_speed();
    convergence_report();
    graceful_degradation();
    gnn_parity();
    cbf_safety();
  } catch (const std::exception& e) {
    report(false, "acceptance", std::string("aborted: ") + e.what());
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
