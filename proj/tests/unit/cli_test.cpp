#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "arena/planner/pddl.hpp"
#include "arena/runtime/episode_log.hpp"
#include "arena/util/files.hpp"
#include "arena/util/json.hpp"
#include "commands.hpp"

using namespace arena;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result arena_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "arena");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("arena_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& s) const { return (path_ / s).string(); }

 private:
  fs::path path_;
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = util::read_file(e.path());
  }
  return out;
}

bool no_temp_files(const fs::path& dir) {
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() == ".tmp") return false;
  }
  return true;
}

}  // namespace

TEST(Cli, GenMissionsIsDeterministic) {
  TempDir t("gen");
  const auto a = arena_cli({"gen-missions", "--seed", "42", "--n", "10", "--out", t / "a"});
  const auto b = arena_cli({"gen-missions", "--seed", "42", "--n", "10", "--out", t / "b"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto sa = snapshot(t / "a"), sb = snapshot(t / "b");
  EXPECT_EQ(sa.size(), 121u);  // 12 types x 10 + index
  EXPECT_EQ(sa, sb);
  EXPECT_TRUE(no_temp_files(t.path()));
  const auto c = arena_cli({"gen-missions", "--seed", "43", "--n", "10", "--out", t / "c"});
  EXPECT_NE(snapshot(t / "c"), sa);

  const auto only = arena_cli({"gen-missions", "--seed", "1", "--n", "3", "--types", "heat&deliver,pour_container",
                               "--out", t / "d"});
  ASSERT_EQ(only.code, 0) << only.err;
  const auto index = util::parse_json(util::read_file(t.path() / "d" / "index.json"), "index");
  EXPECT_EQ(index["missions"].size(), 6u);
  EXPECT_EQ(index["types"], util::Json::array({"heat&deliver", "pourContainer"}));
}

TEST(Cli, PlanWritesExpertLogsThatReplay) {
  TempDir t("plan");
  ASSERT_EQ(arena_cli({"gen-missions", "--seed", "7", "--n", "2", "--out", t / "m"}).code, 0);
  const auto r = arena_cli({"plan", "--cdf", t / "m", "--log-out", t / "logs", "--pddl-out", t / "pddl"});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  EXPECT_NE(r.out.find("planned 24/24"), std::string::npos);
  size_t logs = 0;
  for (const auto& e : fs::directory_iterator(t.path() / "logs")) {
    ++logs;
    const auto log = runtime::parse_log(util::read_file(e.path()));
    EXPECT_EQ(log.m(), 1) << e.path();
    const auto rp = arena_cli({"replay", "--log", e.path().string()});
    EXPECT_EQ(rp.code, 0) << rp.err;
    EXPECT_EQ(rp.out.rfind("ok ", 0), 0u);
  }
  EXPECT_EQ(logs, 24u);
  EXPECT_EQ(snapshot(t.path() / "pddl").size(), 48u);

  // Same bytes on a second run, serial or not.
  const auto again = arena_cli({"plan", "--cdf", t / "m", "--log-out", t / "logs2", "--serial"});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(snapshot(t.path() / "logs"), snapshot(t.path() / "logs2"));
  EXPECT_TRUE(no_temp_files(t.path()));

  const auto ev = arena_cli({"eval", "--episodes", t / "logs", "--out", t / "report.json"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  const auto report = util::parse_json(ev.out, "report");
  EXPECT_EQ(report["msr"], 1.0);
  EXPECT_EQ(report["n_episodes"], 24);
  EXPECT_EQ(util::read_file(t / "report.json"), ev.out);
}

TEST(Cli, PlanSingleCdf) {
  TempDir t("single");
  ASSERT_EQ(arena_cli({"gen-missions", "--seed", "3", "--n", "1", "--types", "heat_deliver", "--out", t / "m"}).code, 0);
  const std::string cdf = t / "m/heat_deliver_00000.json";
  for (const char* mode : {"bfs", "astar"}) {
    const auto r = arena_cli({"plan", "--cdf", cdf, "--log-out", t / "one.jsonl", "--pddl-out", t / "p", "--mode", mode});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(" m 1\n"), std::string::npos) << r.out;
    EXPECT_EQ(runtime::parse_log(util::read_file(t / "one.jsonl")).m(), 1);
  }
  const auto p = planner::parse_pddl(util::read_file(t / "p/heat_deliver_00000.domain.pddl"),
                                     util::read_file(t / "p/heat_deliver_00000.problem.pddl"));
  EXPECT_FALSE(p.operators.empty());
}

TEST(Cli, ReplayOfEditedLogFails) {
  TempDir t("replay");
  ASSERT_EQ(arena_cli({"gen-missions", "--seed", "5", "--n", "1", "--types", "breakObject", "--out", t / "m"}).code, 0);
  ASSERT_EQ(arena_cli({"plan", "--cdf", t / "m/break_object_00000.json", "--log-out", t / "a.jsonl"}).code, 0);
  std::string log = util::read_file(t / "a.jsonl");
  const auto at = log.find("\"score\":999");
  ASSERT_NE(at, std::string::npos);
  log.replace(at, 11, "\"score\":990");
  util::write_file_atomic(t / "b.jsonl", log);
  const auto r = arena_cli({"replay", "--log", t / "b.jsonl"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ReplayDivergence"), std::string::npos) << r.err;
  util::write_file_atomic(t / "c.jsonl", "{not json\n");
  EXPECT_EQ(arena_cli({"replay", "--log", t / "c.jsonl"}).code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(arena_cli({}).code, 2);
  EXPECT_EQ(arena_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(arena_cli({"gen-missions", "--seed", "1"}).code, 2);
  EXPECT_EQ(arena_cli({"gen-missions", "--seed", "1", "--n", "0", "--out", "x"}).code, 2);
  EXPECT_EQ(arena_cli({"gen-missions", "--seed", "1", "--n", "1", "--out", "x", "--types", "juggle"}).code, 2);
  EXPECT_EQ(arena_cli({"plan", "--cdf", "/definitely/not/here"}).code, 2);
  EXPECT_EQ(arena_cli({"plan", "--cdf", ".", "--mode", "dfs"}).code, 2);
  EXPECT_EQ(arena_cli({"replay"}).code, 2);
  EXPECT_EQ(arena_cli({"eval-det", "--gt", "/nope"}).code, 2);
  const auto help = arena_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("gen-missions"), std::string::npos);
}

TEST(Cli, FailuresExitOneWithDiagnostic) {
  TempDir t("fail");
  util::write_file_atomic(t / "bad.json", "{\"cdf_id\": 3}");
  const auto r = arena_cli({"plan", "--cdf", t / "bad.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("arena: ", 0), 0u);
  const auto e = arena_cli({"eval", "--episodes", t.path().string()});
  EXPECT_EQ(e.code, 1);
  EXPECT_NE(e.err.find("EmptyInput"), std::string::npos);
}

TEST(Cli, EvalDet) {
  TempDir t("det");
  util::write_file_atomic(t / "gt.json", R"({"images": [{"image_id": "a", "instances": [{"class": "mug", "box": [0, 0, 10, 1]}]}]})");
  util::write_file_atomic(t / "det.json",
                          R"({"images": [{"image_id": "a", "instances": [{"class": "mug", "score": 0.8, "box": [0, 0, 6, 1]}]}]})");
  for (const char* extra : {"--serial", "--out"}) {
    std::vector<std::string> args = {"eval-det", "--gt", t / "gt.json", "--det", t / "det.json", extra};
    if (std::string(extra) == "--out") args.push_back(t / "r.json");
    const auto r = arena_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = util::parse_json(r.out, "report");
    EXPECT_EQ(j["coco"]["overall"], 0.3);
    EXPECT_EQ(j["tmap"]["combinations"].size(), 30u);
  }
  EXPECT_TRUE(fs::exists(t.path() / "r.json"));
}
