#pragma once

// Benchmark runs over generated scenarios, one record per (instance, planner).

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "navcell/io.hpp"
#include "navcell/pipeline.hpp"
#include "navcell/scenarios.hpp"

namespace navcell {

struct PlannerConfig {
  std::string name = "unguided";
  bool unguided = true;
  int k = 8;
  double beta = 3.0;
};

struct BenchmarkSpec {
  int runs = 1;
  std::uint64_t seed_base = 0;
  std::chrono::milliseconds timeout{20000};
  /// Static scenario entries; an entry with `dynamic_obstacles >= 0` is a dynamic sequence.
  struct Entry {
    ScenarioSpec spec;
    int dynamic_obstacles = -1;
    int dynamic_steps = 5;
  };
  std::vector<Entry> scenarios;
  std::vector<PlannerConfig> planners;
};

inline BenchmarkSpec benchmark_spec_from_json(const Json& j, bool have_model) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "benchmark spec must be an object");
  BenchmarkSpec b;
  try {
    b.runs = j.value("runs", 1);
    b.seed_base = j.value("seed_base", std::uint64_t{0});
    b.timeout = std::chrono::milliseconds(j.value("timeout_ms", 20000));
    for (const auto& e : j.value("scenarios", Json::array())) {
      BenchmarkSpec::Entry entry;
      if (e.contains("dynamic")) {
        entry.dynamic_obstacles = e["dynamic"].value("obstacles", 20);
        entry.dynamic_steps = e["dynamic"].value("steps", 5);
        entry.spec.family = "dynamic";
      } else {
        entry.spec.family = e.at("family").get<std::string>();
        entry.spec.obstacles = e.value("obstacles", -1);
        entry.spec.door_width = e.value("door_width", -1.0);
        entry.spec.clutter = e.value("clutter", -1);
        entry.spec.size = e.value("size", -1);
        family_dimension(entry.spec.family);
      }
      b.scenarios.push_back(entry);
    }
    if (j.contains("planners")) {
      for (const auto& p : j["planners"]) {
        PlannerConfig c;
        c.name = p.value("name", std::string("planner"));
        c.unguided = p.value("unguided", false);
        c.k = p.value("k", 8);
        c.beta = p.value("beta", 3.0);
        b.planners.push_back(c);
      }
    } else {
      if (have_model) b.planners.push_back({"guided", false, 8, 3.0});
      b.planners.push_back({"unguided", true, 8, 3.0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("bad benchmark spec: ") + e.what());
  }
  if (b.runs < 0) throw Error(ErrorCode::InvalidSpec, "runs must be non-negative");
  for (const auto& p : b.planners)
    if (p.k < 1 || !(p.beta >= 0.0)) throw Error(ErrorCode::InvalidSpec, "planner needs k >= 1 and beta >= 0");
  return b;
}

namespace detail {

template <typename Map, Vector V>
BenchmarkRecord bench_one(const std::string& id, const std::string& family, std::uint64_t seed, const Map& map, V qs,
                          V qg, const PlannerConfig& pc, const BenchmarkSpec& spec,
                          std::shared_ptr<const GnnWeights> model) {
  BenchmarkRecord r;
  r.scenario = id;
  r.family = family;
  r.seed = seed;
  r.planner = pc.name;
  r.k = pc.k;
  r.beta = pc.beta;
  PipelineOptions opt;
  opt.plan = {pc.k, pc.beta, spec.timeout};
  opt.unguided = pc.unguided || !model;
  opt.model = model;
  try {
    const auto res = run_pipeline(map, qs, qg, opt);
    r.success = std::isfinite(res.plan.cost);
    r.time_to_first_ms = res.plan.time_to_first_ms;
    r.final_cost = res.plan.cost;
    r.enumerated = res.plan.phase1.enumerated + res.plan.phase2.enumerated;
    r.evaluated = res.plan.phase1.evaluated + res.plan.phase2.evaluated;
    for (const auto& t : res.plan.trace) r.trace.push_back({t.time_ms, t.cost});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSolution) throw;
    r.success = false;
    r.final_cost = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace detail

inline std::vector<BenchmarkRecord> run_benchmark(const BenchmarkSpec& spec, std::shared_ptr<const GnnWeights> model) {
  std::vector<BenchmarkRecord> out;
  for (std::size_t e = 0; e < spec.scenarios.size(); ++e) {
    const auto& entry = spec.scenarios[e];
    for (int run = 0; run < spec.runs; ++run) {
      const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(run);
      if (entry.dynamic_obstacles >= 0) {
        const auto d = generate_dynamic(seed, entry.dynamic_obstacles, entry.dynamic_steps);
        for (std::size_t k = 0; k < d.steps.size(); ++k) {
          const std::string id = "dynamic-e" + std::to_string(e) + "-s" + std::to_string(seed) + "-t" + std::to_string(k);
          for (const auto& pc : spec.planners)
            out.push_back(detail::bench_one(id, "dynamic", seed, d.map_at(k), d.start, d.goal, pc, spec, model));
        }
        continue;
      }
      ScenarioSpec s = entry.spec;
      s.seed = seed;
      const Scenario sc = generate(s);
      const std::string id = sc.family + "-e" + std::to_string(e) + "-s" + std::to_string(seed);
      for (const auto& pc : spec.planners) {
        if (sc.dim == 2)
          out.push_back(detail::bench_one(id, sc.family, seed, sc.map2, sc.start2(), sc.goal2(), pc, spec, model));
        else
          out.push_back(detail::bench_one(id, sc.family, seed, sc.map3, sc.start3(), sc.goal3(), pc, spec, model));
      }
    }
  }
  return out;
}

struct BenchmarkSummary {
  std::string family;
  std::string planner;
  int runs = 0;
  int successes = 0;
  double median_time_to_first_ms = 0.0;
  double median_cost = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Medians over successful runs, grouped by (family, planner).
inline std::vector<BenchmarkSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::vector<const BenchmarkRecord*>> groups;
  for (const auto& r : records) groups[{r.family, r.planner}].push_back(&r);
  std::vector<BenchmarkSummary> out;
  for (const auto& [key, rs] : groups) {
    BenchmarkSummary s{key.first, key.second, static_cast<int>(rs.size()), 0, 0.0, 0.0};
    std::vector<double> ttf, cost;
    for (const auto* r : rs)
      if (r->success) {
        ++s.successes;
        ttf.push_back(r->time_to_first_ms);
        cost.push_back(r->final_cost);
      }
    s.median_time_to_first_ms = median(ttf);
    s.median_cost = median(cost);
    out.push_back(s);
  }
  return out;
}

}  // namespace navcell
