#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "navcell/io.hpp"
#include "weights_util.hpp"

using namespace navcell;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("navcell_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path file(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  Outcome run(const std::string& args, const std::string& env = "") const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " " + NAVCELL_CLI_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

const char* kEmptySquare = R"({"dim":2,"bounds":[0,0,1,1],"obstacles":[]})";

// A closed ring of four touching walls around the centre.
const char* kSealedRoom = R"({"dim":2,"bounds":[0,0,1,1],"obstacles":[
  {"polygon":[[0.3,0.3],[0.7,0.3],[0.7,0.35],[0.3,0.35]]},
  {"polygon":[[0.3,0.65],[0.7,0.65],[0.7,0.7],[0.3,0.7]]},
  {"polygon":[[0.3,0.35],[0.35,0.35],[0.35,0.65],[0.3,0.65]]},
  {"polygon":[[0.65,0.35],[0.7,0.35],[0.7,0.65],[0.65,0.65]]}]})";

}  // namespace

TEST_F(Cli, SameCellQueryCostsEuclideanDistance) {
  const auto map = file("map.json", kEmptySquare);
  const Outcome r = run("plan --map " + map.string() + " --start 0.1,0.05 --goal 0.15,0.06 --unguided");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["cost"].get<double>(), std::hypot(0.05, 0.01));
  EXPECT_EQ(j["waypoints"].size(), 2u);
  for (const char* key : {"waypoints", "cost", "time_ms", "phase_counters"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, SealedRoomExitsWithNoSolution) {
  const auto map = file("map.json", kSealedRoom);
  const Outcome r = run("plan --map " + map.string() + " --start 0.5,0.5 --goal 0.05,0.05");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("NoSolution"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, InputErrorsExitWithThree) {
  const auto map = file("map.json", kEmptySquare);
  const auto bad = file("bad.json", "{\"dim\":2,");
  EXPECT_EQ(run("plan --map " + bad.string() + " --start 0.1,0.1 --goal 0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map /nonexistent.json --start 0.1,0.1 --goal 0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --start 0.1 --goal 0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --start 0.1,0.1,0.1 --goal 0.9,0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --start 2,2 --goal 0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --goal 0.9,0.9").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --start 0.1,0.1 --goal 0.9,0.9 --k 0").code, 3);
  EXPECT_EQ(run("plan --map " + map.string() + " --start 0.1,0.1 --goal 0.9,0.9 --model " + bad.string()).code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
  const Outcome r = run("gen-scenario --family volcano");
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, BetaZeroMatchesUnguided) {
  const auto model = file("model.json", testutil::random_weights({}).dump());
  for (const char* family : {"forest", "multi_room"}) {
    const Outcome gen = run(std::string("gen-scenario --family ") + family + " --seed 3 -o " + (dir_ / "map.json").string());
    ASSERT_EQ(gen.code, 0) << gen.err;
    const Json doc = Json::parse(slurp(dir_ / "map.json"));
    const std::string q = " --start " + std::to_string(doc["query"]["start"][0].get<double>()) + "," +
                          std::to_string(doc["query"]["start"][1].get<double>()) + " --goal " +
                          std::to_string(doc["query"]["goal"][0].get<double>()) + "," +
                          std::to_string(doc["query"]["goal"][1].get<double>());
    const std::string base = "plan --deterministic --k 4 --map " + (dir_ / "map.json").string() + q;
    const Outcome guided = run(base + " --beta 0 --model " + model.string());
    const Outcome unguided = run(base + " --unguided");
    ASSERT_EQ(guided.code, 0) << guided.err;
    ASSERT_EQ(unguided.code, 0) << unguided.err;
    EXPECT_EQ(guided.out, unguided.out) << family;
    // The environment variable supplies the same model.
    const Outcome env = run(base + " --beta 0", "NAVCELL_MODEL=" + model.string());
    EXPECT_EQ(env.out, unguided.out);
    const Outcome steered = run(base + " --beta 3 --model " + model.string());
    EXPECT_EQ(steered.code, 0);
  }
}

TEST_F(Cli, EmptyBenchmarkIsHeaderOnly) {
  const auto spec = file("spec.json", R"({"runs":3,"scenarios":[]})");
  const Outcome r = run("benchmark --spec " + spec.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(parse_benchmark_csv(r.out).empty());
  EXPECT_EQ(r.out.rfind(kBenchmarkCsvTag, 0), 0u);
}

TEST_F(Cli, BenchmarkRoundTripsAndPrintsMedians) {
  const auto spec = file("spec.json", R"({"scenarios":[{"family":"forest","obstacles":8}]})");
  const Outcome r = run("benchmark --spec " + spec.string() + " --runs 2 --seed-base 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto records = parse_benchmark_csv(r.out);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_TRUE(records[0].success);
  EXPECT_EQ(records[1].seed, 6u);
  EXPECT_NE(r.err.find("median"), std::string::npos);
}

TEST_F(Cli, OtherCommands) {
  const Outcome gen = run("gen-scenario --family bn_maze3d --seed 1 -o " + (dir_ / "m3.json").string());
  ASSERT_EQ(gen.code, 0) << gen.err;
  const Outcome dec = run("decompose --map " + (dir_ / "m3.json").string());
  ASSERT_EQ(dec.code, 0) << dec.err;
  EXPECT_FALSE(Json::parse(dec.out)["cells"].empty());
  // Query taken from the generated map.
  const Outcome graph = run("export-graph --map " + (dir_ / "m3.json").string());
  ASSERT_EQ(graph.code, 0) << graph.err;
  const Json g = Json::parse(graph.out);
  EXPECT_EQ(g["d_n"].get<int>(), 14);
  EXPECT_EQ(g["X"].size(), g["num_nodes"].get<std::size_t>());
  const Outcome plan3 = run("plan --k 2 --map " + (dir_ / "m3.json").string() + " --start 0.05,0.05,0.05 --goal 0.95,0.95,0.95");
  EXPECT_EQ(plan3.code, 0) << plan3.err;

  const auto map = file("map.json", kEmptySquare);
  const Outcome cbf = run("execute-cbf --map " + map.string() + " --start 0.2,0.2 --goal 0.8,0.7 --r 0.05");
  ASSERT_EQ(cbf.code, 0) << cbf.err;
  const Json t = Json::parse(cbf.out);
  EXPECT_TRUE(t["trajectory"]["reached"].get<bool>());
  EXPECT_EQ(run("execute-cbf --map " + map.string() + " --start 0.02,0.5 --goal 0.8,0.7 --r 0.05").code, 3);
  EXPECT_EQ(run("execute-cbf --map " + (dir_ / "m3.json").string()).code, 3);

  const Outcome dyn = run("gen-scenario --dynamic 10 --steps 3 --seed 2");
  ASSERT_EQ(dyn.code, 0) << dyn.err;
  EXPECT_EQ(dynamic_from_json(Json::parse(dyn.out)).steps.size(), 3u);
  EXPECT_EQ(run("gen-scenario --list").code, 0);
  EXPECT_EQ(run("--help").code, 0);
}
