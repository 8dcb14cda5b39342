#pragma once

// JSON and CSV formats: maps, paths, graphs, decompositions, trajectories,
// dynamic scenarios and benchmark records.

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "navcell/cbf.hpp"
#include "navcell/cellgraph.hpp"
#include "navcell/decomp2d.hpp"
#include "navcell/decomp3d.hpp"
#include "navcell/error.hpp"
#include "navcell/scenarios.hpp"
#include "navcell/search.hpp"

namespace navcell {

using Json = nlohmann::json;

inline constexpr std::string_view kGraphFormat = "navcell-graph";
inline constexpr int kGraphSchemaVersion = 1;
inline constexpr std::string_view kBenchmarkCsvTag = "# navcell-benchmark-csv v1";

namespace detail {

template <typename T>
T json_get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidInput, std::string("bad value for field ") + key);
  }
}

inline std::vector<double> numbers(const Json& j, std::size_t n, const char* what) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a number list");
  }
  if (v.size() != n) throw Error(ErrorCode::InvalidInput, std::string(what) + " needs " + std::to_string(n) + " numbers");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, std::string(what) + " is not finite");
  return v;
}

inline Json point_json(Point2 p) { return Json::array({p.x, p.y}); }
inline Json point_json(Point3 p) { return Json::array({p.x, p.y, p.z}); }

inline Json box_json(const Aabb3& b) { return {{"min", point_json(b.min)}, {"max", point_json(b.max)}}; }

inline Aabb3 box_from_json(const Json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an object");
  const auto lo = numbers(json_get<Json>(j, "min"), 3, what), hi = numbers(json_get<Json>(j, "max"), 3, what);
  return {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
}

}  // namespace detail

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

// Maps.

struct AnyMap {
  int dim = 2;
  Map2 map2;
  Map3 map3;
};

inline Json map_to_json(const Map2& m) {
  Json obs = Json::array();
  for (const auto& p : m.obstacles) {
    Json poly = Json::array();
    for (const auto& v : p.vertices) poly.push_back(detail::point_json(v));
    obs.push_back({{"polygon", poly}});
  }
  return {{"dim", 2},
          {"bounds", {m.bounds.min.x, m.bounds.min.y, m.bounds.max.x, m.bounds.max.y}},
          {"obstacles", obs}};
}

inline Json map_to_json(const Map3& m) {
  Json obs = Json::array();
  for (const auto& b : m.obstacles) obs.push_back(detail::box_json(b));
  return {{"dim", 3}, {"bounds", detail::box_json(m.bounds)}, {"obstacles", obs}};
}

inline AnyMap map_from_json(const Json& j) {
  AnyMap out;
  out.dim = detail::json_get<int>(j, "dim");
  const Json obs = j.contains("obstacles") ? j.at("obstacles") : Json::array();
  if (!obs.is_array()) throw Error(ErrorCode::InvalidInput, "obstacles must be a list");
  if (out.dim == 2) {
    const auto b = detail::numbers(detail::json_get<Json>(j, "bounds"), 4, "bounds");
    out.map2.bounds = {{b[0], b[1]}, {b[2], b[3]}};
    for (const auto& o : obs) {
      const Json poly = detail::json_get<Json>(o, "polygon");
      if (!poly.is_array()) throw Error(ErrorCode::InvalidInput, "polygon must be a list");
      SimplePolygon p;
      for (const auto& v : poly) {
        const auto xy = detail::numbers(v, 2, "polygon vertex");
        p.vertices.push_back({xy[0], xy[1]});
      }
      out.map2.obstacles.push_back(std::move(p));
    }
  } else if (out.dim == 3) {
    out.map3.bounds = detail::box_from_json(detail::json_get<Json>(j, "bounds"), "bounds");
    for (const auto& o : obs) out.map3.obstacles.push_back(detail::box_from_json(o, "obstacle"));
  } else {
    throw Error(ErrorCode::InvalidInput, "dim must be 2 or 3");
  }
  return out;
}

inline Json scenario_to_json(const Scenario& s) {
  Json j = s.dim == 2 ? map_to_json(s.map2) : map_to_json(s.map3);
  j["query"] = {{"start", s.start}, {"goal", s.goal}};
  j["meta"] = {{"family", s.family}, {"seed", s.seed}, {"door_width", s.door_width}};
  return j;
}

/// Parses "x,y[,z]".
inline std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const char* first = item.data();
    const char* last = item.data() + item.size();
    while (first < last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
      throw Error(ErrorCode::InvalidInput, "bad coordinate list: " + text);
    out.push_back(v);
  }
  if (out.size() < 2 || out.size() > 3) throw Error(ErrorCode::InvalidInput, "expected x,y or x,y,z: " + text);
  return out;
}

// Paths.

template <Vector V>
Json path_to_json(const PlanResult<V>& r, bool deterministic = false) {
  Json wp = Json::array();
  for (const auto& p : r.path.waypoints) wp.push_back(detail::point_json(p));
  auto counters = [](const PhaseCounters& c) {
    return Json{{"yen_calls", c.yen_calls}, {"enumerated", c.enumerated}, {"evaluated", c.evaluated}};
  };
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    Json e = {{"cost", t.cost}, {"phase", t.phase}, {"corridor_id", t.corridor_id}};
    if (!deterministic) e["time_ms"] = t.time_ms;
    trace.push_back(e);
  }
  Json j = {{"dim", V::size()},
            {"waypoints", wp},
            {"cost", r.cost},
            {"cells", r.path.cells},
            {"corridor_id", r.path.corridor_id},
            {"phase", r.path.phase},
            {"phase_counters",
             {{"phase1", counters(r.phase1)}, {"phase2", counters(r.phase2)}, {"phase2_iterations", r.phase2_iterations}}},
            {"timed_out", r.timed_out},
            {"budget_exhausted", r.budget_exhausted},
            {"trace", trace},
            {"warnings", r.warnings}};
  if (!deterministic) {
    j["time_ms"] = r.time_ms;
    j["time_to_first_ms"] = r.time_to_first_ms;
  }
  return j;
}

// Graph export for the trainer.

template <Vector V>
Json graph_to_json(const CellGraph<V>& g) {
  using Traits = GraphTraits<V>;
  Json edges = Json::array(), portals = Json::array(), x = Json::array(), e = Json::array();
  for (const auto& [s, d] : g.directed_edges()) edges.push_back({s, d});
  for (const auto& p : g.portals)
    portals.push_back({{"a", p.a}, {"b", p.b}, {"src", p.src}, {"dst", p.dst}, {"size", p.size}});
  for (Eigen::Index i = 0; i < g.node_features.rows(); ++i) {
    std::vector<double> row(g.node_features.cols());
    for (Eigen::Index c = 0; c < g.node_features.cols(); ++c) row[c] = g.node_features(i, c);
    x.push_back(row);
  }
  for (Eigen::Index i = 0; i < g.edge_features.rows(); ++i) {
    std::vector<double> row(g.edge_features.cols());
    for (Eigen::Index c = 0; c < g.edge_features.cols(); ++c) row[c] = g.edge_features(i, c);
    e.push_back(row);
  }
  Json centroids = Json::array();
  for (const auto& c : g.cells) centroids.push_back(detail::point_json(c.centroid));
  return {{"format", std::string(kGraphFormat)},
          {"schema_version", kGraphSchemaVersion},
          {"feature_version", std::string(Traits::kFeatureVersion)},
          {"dim", Traits::kDim},
          {"d_n", Traits::kNodeFeatures},
          {"d_e", Traits::kEdgeFeatures},
          {"num_nodes", g.num_cells()},
          {"num_portals", g.num_portals()},
          {"edges", edges},
          {"portals", portals},
          {"X", x},
          {"E", e},
          {"centroids", centroids},
          {"start_cell", g.start_cell},
          {"goal_cell", g.goal_cell},
          {"qs", detail::point_json(g.qs)},
          {"qg", detail::point_json(g.qg)},
          {"diagonal", g.diagonal}};
}

// Decompositions.

inline Json decomposition_to_json(const Triangulation& t) {
  Json verts = Json::array(), tris = Json::array(), free = Json::array(), nbrs = Json::array();
  for (const auto& v : t.vertices) verts.push_back(detail::point_json(v));
  for (std::size_t i = 0; i < t.size(); ++i) {
    tris.push_back(t.triangles[i]);
    nbrs.push_back(t.neighbors[i]);
    free.push_back(static_cast<bool>(t.free[i]));
  }
  return {{"dim", 2},
          {"bounds", {t.bounds.min.x, t.bounds.min.y, t.bounds.max.x, t.bounds.max.y}},
          {"vertices", verts},
          {"triangles", tris},
          {"neighbors", nbrs},
          {"free", free},
          {"num_free", t.free_triangles().size()},
          {"free_area", t.free_area()}};
}

inline Json decomposition_to_json(const SlabDecomposition& d) {
  Json cells = Json::array(), portals = Json::array();
  for (const auto& c : d.cells) cells.push_back(detail::box_json(c));
  for (const auto& p : extract_portals(d)) {
    Json e = detail::box_json(p.face.box);
    e["a"] = p.a;
    e["b"] = p.b;
    e["normal_axis"] = p.face.normal_axis;
    portals.push_back(e);
  }
  return {{"dim", 3},
          {"bounds", detail::box_json(d.bounds)},
          {"cells", cells},
          {"portals", portals},
          {"free_volume", d.free_volume()}};
}

// Trajectories.

inline Json trajectory_to_json(const Trajectory& t) {
  Json samples = Json::array(), iv = Json::array();
  for (const auto& s : t.samples)
    samples.push_back({{"t", s.t},
                       {"x", s.x},
                       {"y", s.y},
                       {"theta", s.theta},
                       {"v", s.v},
                       {"h", std::isfinite(s.h) ? Json(s.h) : Json(nullptr)},
                       {"constraints", s.constraints},
                       {"active", s.active},
                       {"clamped", s.clamped},
                       {"cell", s.cell}});
  for (const auto& i : t.interventions)
    iv.push_back({{"step", i.step}, {"t", i.t}, {"cell", i.cell}, {"v_nominal", i.v_nominal}, {"v", i.v}, {"h", i.h}});
  return {{"samples", samples},
          {"interventions", iv},
          {"reached", t.reached},
          {"min_h", std::isfinite(t.min_h) ? Json(t.min_h) : Json(nullptr)},
          {"max_active", t.max_active}};
}

// Dynamic scenarios.

inline Json dynamic_to_json(const DynamicScenario& d) {
  Json steps = Json::array(), kinds = Json::array();
  for (const auto& st : d.steps) steps.push_back({{"obstacles", map_to_json(Map2{d.bounds, st.obstacles})["obstacles"]}});
  for (const auto& o : d.obstacles)
    kinds.push_back(o.kind == ObstacleKind::Static ? "static" : o.kind == ObstacleKind::Moving ? "moving" : "toggling");
  return {{"dim", 2},
          {"bounds", {d.bounds.min.x, d.bounds.min.y, d.bounds.max.x, d.bounds.max.y}},
          {"query", {{"start", detail::point_json(d.start)}, {"goal", detail::point_json(d.goal)}}},
          {"dt", d.dt},
          {"kinds", kinds},
          {"steps", steps}};
}

inline DynamicScenario dynamic_from_json(const Json& j) {
  DynamicScenario d;
  const auto b = detail::numbers(detail::json_get<Json>(j, "bounds"), 4, "bounds");
  d.bounds = {{b[0], b[1]}, {b[2], b[3]}};
  const Json q = detail::json_get<Json>(j, "query");
  const auto s = detail::numbers(detail::json_get<Json>(q, "start"), 2, "start");
  const auto g = detail::numbers(detail::json_get<Json>(q, "goal"), 2, "goal");
  d.start = {s[0], s[1]};
  d.goal = {g[0], g[1]};
  for (const auto& st : detail::json_get<Json>(j, "steps")) {
    Json m = {{"dim", 2}, {"bounds", j.at("bounds")}, {"obstacles", detail::json_get<Json>(st, "obstacles")}};
    d.steps.push_back({map_from_json(m).map2.obstacles});
  }
  return d;
}

// Benchmark CSV.

struct BenchmarkRecord {
  std::string scenario;
  std::string family;
  std::uint64_t seed = 0;
  std::string planner;
  int k = 8;
  double beta = 3.0;
  bool success = false;
  double time_to_first_ms = 0.0;
  double final_cost = 0.0;
  int enumerated = 0;
  int evaluated = 0;
  std::vector<std::pair<double, double>> trace;

  bool operator==(const BenchmarkRecord&) const = default;
};

inline constexpr std::string_view kBenchmarkHeader =
    "scenario,family,seed,planner,k,beta,success,time_to_first_ms,final_cost,enumerated,evaluated,trace";

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidInput, "bad number in benchmark CSV: " + std::string(s));
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string benchmark_csv_row(const BenchmarkRecord& r) {
  for (const std::string* s : {&r.scenario, &r.family, &r.planner})
    if (s->find_first_of(",\n;:") != std::string::npos)
      throw Error(ErrorCode::InvalidInput, "benchmark field contains a separator: " + *s);
  std::string trace;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (i) trace += ';';
    trace += detail::fmt(r.trace[i].first) + ':' + detail::fmt(r.trace[i].second);
  }
  return r.scenario + ',' + r.family + ',' + std::to_string(r.seed) + ',' + r.planner + ',' + std::to_string(r.k) + ',' +
         detail::fmt(r.beta) + ',' + (r.success ? "1" : "0") + ',' + detail::fmt(r.time_to_first_ms) + ',' +
         detail::fmt(r.final_cost) + ',' + std::to_string(r.enumerated) + ',' + std::to_string(r.evaluated) + ',' + trace;
}

inline std::string benchmark_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out = std::string(kBenchmarkCsvTag) + '\n' + std::string(kBenchmarkHeader) + '\n';
  for (const auto& r : records) out += benchmark_csv_row(r) + '\n';
  return out;
}

inline std::vector<BenchmarkRecord> parse_benchmark_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != kBenchmarkCsvTag)
    throw Error(ErrorCode::InvalidInput, "missing benchmark CSV version tag");
  if (!std::getline(ss, line) || line != kBenchmarkHeader) throw Error(ErrorCode::InvalidInput, "unexpected CSV header");
  std::vector<BenchmarkRecord> out;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 12) throw Error(ErrorCode::InvalidInput, "benchmark row needs 12 fields");
    BenchmarkRecord r;
    try {
    r.scenario = f[0];
    r.family = f[1];
    r.seed = std::stoull(f[2]);
    r.planner = f[3];
    r.k = std::stoi(f[4]);
    r.beta = detail::parse_double(f[5]);
    r.success = f[6] == "1";
    r.time_to_first_ms = detail::parse_double(f[7]);
    r.final_cost = detail::parse_double(f[8]);
    r.enumerated = std::stoi(f[9]);
    r.evaluated = std::stoi(f[10]);
    if (!f[11].empty())
      for (const auto& item : detail::split(f[11], ';')) {
        const auto tc = detail::split(item, ':');
        if (tc.size() != 2) throw Error(ErrorCode::InvalidInput, "bad trace entry " + item);
        r.trace.push_back({detail::parse_double(tc[0]), detail::parse_double(tc[1])});
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidInput, "bad integer in benchmark row: " + line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace navcell
