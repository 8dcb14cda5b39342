#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "navcell/navcell.hpp"

using namespace navcell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitNoSolution = 2;
constexpr int kExitInput = 3;

struct QueryArgs {
  std::string map;
  std::string start;
  std::string goal;
};

struct ModelArgs {
  std::string model;
  bool unguided = false;
  int k = 8;
  double beta = 3.0;
  int timeout_ms = 20000;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Point from a flag, else from the map's "query" block.
std::vector<double> query_point(const std::string& flag, const Json& doc, const char* key, int dim) {
  std::vector<double> p;
  if (!flag.empty())
    p = parse_point(flag);
  else if (doc.contains("query") && doc["query"].contains(key))
    p = doc["query"][key].get<std::vector<double>>();
  else
    throw Error(ErrorCode::InvalidInput, std::string("--") + key + " is required");
  if (static_cast<int>(p.size()) != dim)
    throw Error(ErrorCode::InvalidInput, std::string(key) + " has " + std::to_string(p.size()) + " coordinates, map is " +
                                             std::to_string(dim) + "D");
  return p;
}

Point2 p2(const std::vector<double>& v) { return {v[0], v[1]}; }
Point3 p3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

std::shared_ptr<const GnnWeights> resolve_model(const ModelArgs& m) {
  if (m.unguided) return nullptr;
  std::string path = m.model;
  if (path.empty())
    if (const char* env = std::getenv("NAVCELL_MODEL")) path = env;
  if (path.empty()) return nullptr;
  return std::make_shared<const GnnWeights>(load_weights(path));
}

PipelineOptions pipeline_options(const ModelArgs& m) {
  if (m.k < 1) throw Error(ErrorCode::InvalidInput, "--k must be at least 1");
  if (!(m.beta >= 0.0)) throw Error(ErrorCode::InvalidInput, "--beta must be non-negative");
  if (m.timeout_ms < 0) throw Error(ErrorCode::InvalidInput, "--timeout-ms must be non-negative");
  PipelineOptions opt;
  opt.plan = {m.k, m.beta, std::chrono::milliseconds(m.timeout_ms)};
  opt.model = resolve_model(m);
  opt.unguided = m.unguided || !opt.model;
  return opt;
}

void add_query(CLI::App* cmd, QueryArgs& q, bool required) {
  cmd->add_option("--map", q.map, "Map JSON file")->required();
  auto* s = cmd->add_option("--start", q.start, "Start point x,y[,z]");
  auto* g = cmd->add_option("--goal", q.goal, "Goal point x,y[,z]");
  if (required) {
    s->required();
    g->required();
  }
}

void add_model(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.model, "GNN weight JSON (default: $NAVCELL_MODEL)");
  cmd->add_flag("--unguided", m.unguided, "Plan on centroid distances only");
  cmd->add_option("--k", m.k, "Corridors per Yen call")->capture_default_str();
  cmd->add_option("--beta", m.beta, "Score modulation strength")->capture_default_str();
  cmd->add_option("--timeout-ms", m.timeout_ms, "Planning budget in milliseconds")->capture_default_str();
}

int cmd_plan(const QueryArgs& q, const ModelArgs& m, bool deterministic, const std::string& out) {
  const Json doc = read_json_file(q.map);
  const AnyMap map = map_from_json(doc);
  const auto qs = query_point(q.start, doc, "start", map.dim);
  const auto qg = query_point(q.goal, doc, "goal", map.dim);
  const PipelineOptions opt = pipeline_options(m);
  Json j = map.dim == 2 ? path_to_json(run_pipeline(map.map2, p2(qs), p2(qg), opt).plan, deterministic)
                        : path_to_json(run_pipeline(map.map3, p3(qs), p3(qg), opt).plan, deterministic);
  for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  emit(out, dump(j));
  return kExitOk;
}

int cmd_decompose(const std::string& map_path, const std::string& out) {
  const AnyMap map = map_from_json(read_json_file(map_path));
  const Json j = map.dim == 2 ? decomposition_to_json(triangulate(map.map2)) : decomposition_to_json(slab_decompose(map.map3));
  emit(out, dump(j));
  return kExitOk;
}

int cmd_export_graph(const QueryArgs& q, const std::string& out) {
  const Json doc = read_json_file(q.map);
  const AnyMap map = map_from_json(doc);
  const auto qs = query_point(q.start, doc, "start", map.dim);
  const auto qg = query_point(q.goal, doc, "goal", map.dim);
  const Json j = map.dim == 2 ? graph_to_json(build_graph(triangulate(map.map2), p2(qs), p2(qg)))
                              : graph_to_json(build_graph(slab_decompose(map.map3), p3(qs), p3(qg)));
  emit(out, j.dump() + "\n");
  return kExitOk;
}

struct ScenarioArgs {
  ScenarioSpec spec;
  std::string start;
  std::string goal;
  int dynamic = -1;
  int steps = 5;
  bool list = false;
};

int cmd_gen_scenario(ScenarioArgs a, const std::string& out) {
  if (a.list) {
    for (const auto& f : scenario_families()) std::cout << f << " " << family_dimension(f) << "D\n";
    return kExitOk;
  }
  if (a.dynamic >= 0) {
    emit(out, dump(dynamic_to_json(generate_dynamic(a.spec.seed, a.dynamic, a.steps))));
    return kExitOk;
  }
  if (!a.start.empty()) a.spec.start = parse_point(a.start);
  if (!a.goal.empty()) a.spec.goal = parse_point(a.goal);
  emit(out, dump(scenario_to_json(generate(a.spec))));
  return kExitOk;
}

struct BenchArgs {
  std::string spec;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed_base;
  std::optional<int> timeout_ms;
  std::string model;
};

int cmd_benchmark(const BenchArgs& a, const std::string& out) {
  ModelArgs m;
  m.model = a.model;
  const auto model = resolve_model(m);
  BenchmarkSpec spec = benchmark_spec_from_json(read_json_file(a.spec), model != nullptr);
  if (a.runs) spec.runs = *a.runs;
  if (a.seed_base) spec.seed_base = *a.seed_base;
  if (a.timeout_ms) spec.timeout = std::chrono::milliseconds(*a.timeout_ms);
  if (spec.runs < 0) throw Error(ErrorCode::InvalidSpec, "--runs must be non-negative");
  const auto records = run_benchmark(spec, model);
  emit(out, benchmark_csv(records));
  for (const auto& s : summarize(records))
    std::cerr << s.family << " " << s.planner << ": success " << s.successes << "/" << s.runs
              << ", median time-to-first " << s.median_time_to_first_ms << " ms, median cost " << s.median_cost << "\n";
  return kExitOk;
}

int cmd_execute_cbf(const QueryArgs& q, const ModelArgs& m, const BarrierConfig& cfg, const std::string& out) {
  const Json doc = read_json_file(q.map);
  const AnyMap map = map_from_json(doc);
  if (map.dim != 2) throw Error(ErrorCode::InvalidInput, "execute-cbf needs a 2D map");
  const auto qs = query_point(q.start, doc, "start", 2);
  const auto qg = query_point(q.goal, doc, "goal", 2);
  const auto res = run_pipeline(map.map2, p2(qs), p2(qg), pipeline_options(m));
  const Trajectory traj = execute_guarded(res.plan.path, res.graph, cfg);
  if (!traj.reached) std::cerr << "warning: goal not reached within " << traj.samples.size() << " steps\n";
  emit(out, dump({{"path", path_to_json(res.plan, true)}, {"trajectory", trajectory_to_json(traj)}}));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-decomposition motion planner with learned portal guidance"};
  app.require_subcommand(1);
  std::string out;
  std::function<int()> run;

  QueryArgs plan_q;
  ModelArgs plan_m;
  bool deterministic = false;
  auto* plan = app.add_subcommand("plan", "Plan a path and print it as JSON");
  add_query(plan, plan_q, true);
  add_model(plan, plan_m);
  plan->add_flag("--deterministic", deterministic, "Omit wall-clock fields from the output");
  plan->add_option("--output,-o", out, "Output file (default: stdout)");
  plan->callback([&] { run = [&] { return cmd_plan(plan_q, plan_m, deterministic, out); }; });

  std::string decomp_map;
  auto* decompose = app.add_subcommand("decompose", "Print the convex cell decomposition of a map");
  decompose->add_option("--map", decomp_map, "Map JSON file")->required();
  decompose->add_option("--output,-o", out, "Output file (default: stdout)");
  decompose->callback([&] { run = [&] { return cmd_decompose(decomp_map, out); }; });

  ScenarioArgs sc;
  auto* gen = app.add_subcommand("gen-scenario", "Generate a scenario map with a query");
  gen->add_option("--family", sc.spec.family, "Scenario family")->capture_default_str();
  gen->add_option("--seed", sc.spec.seed, "Random seed")->capture_default_str();
  gen->add_option("--obstacles", sc.spec.obstacles, "Obstacle count override");
  gen->add_option("--door-width", sc.spec.door_width, "Door or gap width override");
  gen->add_option("--clutter", sc.spec.clutter, "Clutter obstacle count override");
  gen->add_option("--size", sc.spec.size, "Grid size override for maze families");
  gen->add_option("--start", sc.start, "Start point x,y[,z]");
  gen->add_option("--goal", sc.goal, "Goal point x,y[,z]");
  gen->add_option("--dynamic", sc.dynamic, "Emit a dynamic sequence with this many obstacles");
  gen->add_option("--steps", sc.steps, "Steps in a dynamic sequence")->capture_default_str();
  gen->add_flag("--list", sc.list, "List scenario families");
  gen->add_option("--output,-o", out, "Output file (default: stdout)");
  gen->callback([&] { run = [&] { return cmd_gen_scenario(sc, out); }; });

  QueryArgs graph_q;
  auto* exp = app.add_subcommand("export-graph", "Export the cell graph with features as JSON");
  add_query(exp, graph_q, false);
  exp->add_option("--output,-o", out, "Output file (default: stdout)");
  exp->callback([&] { run = [&] { return cmd_export_graph(graph_q, out); }; });

  BenchArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Run a benchmark suite and print CSV records");
  bench->add_option("--spec", ba.spec, "Benchmark spec JSON file")->required();
  bench->add_option("--runs", ba.runs, "Runs per scenario entry");
  bench->add_option("--seed-base", ba.seed_base, "First seed");
  bench->add_option("--timeout-ms", ba.timeout_ms, "Planning budget per run");
  bench->add_option("--model", ba.model, "GNN weight JSON (default: $NAVCELL_MODEL)");
  bench->add_option("--output,-o", out, "Output file (default: stdout)");
  bench->callback([&] { run = [&] { return cmd_benchmark(ba, out); }; });

  QueryArgs cbf_q;
  ModelArgs cbf_m;
  BarrierConfig cfg;
  auto* cbf = app.add_subcommand("execute-cbf", "Plan, then execute the path under a barrier-function speed guard");
  add_query(cbf, cbf_q, false);
  add_model(cbf, cbf_m);
  cbf->add_option("--r", cfg.r, "Robot radius")->capture_default_str();
  cbf->add_option("--gamma", cfg.gamma, "Barrier decay rate")->capture_default_str();
  cbf->add_option("--dt", cfg.dt, "Time step in seconds")->capture_default_str();
  cbf->add_option("--v-nom", cfg.v_nom, "Nominal speed in diagonals per second")->capture_default_str();
  cbf->add_option("--max-steps", cfg.max_steps, "Step limit (0: automatic)")->capture_default_str();
  cbf->add_option("--output,-o", out, "Output file (default: stdout)");
  cbf->callback([&] { run = [&] { return cmd_execute_cbf(cbf_q, cbf_m, cfg, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NoSolution ? kExitNoSolution : kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
