#include "doctest.h"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("gromov_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

const Scratch& scratch() {
  static Scratch s;
  return s;
}

// stdout and stderr go to a log so failures stay readable
int run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" + GROMOV_CLI_PATH + "' " + args + " > '" +
                    scratch()("last.log") + "' 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

const char* kDisk = R"({"vars": 2, "box": {"n": 1}, "union": [[{"poly": "x1^2 + x2^2 - 1", "rel": "<"}]]})";
const char* kSquare = R"({"vars": 2, "box": {"n": 1}, "union": [[]]})";

}  // namespace

TEST_CASE("resolve1d of x^2 at order 1 gives two charts") {
  auto out = scratch()("sq.json");
  REQUIRE(run("resolve1d --poly 'x1^2' --r 1 --out '" + out + "'") == 0);
  json j = json::parse(slurp(out));
  CHECK(j["charts"].size() == 2);
  CHECK(j["dim"] == 1);
  CHECK_FALSE(fs::exists(out + ".diagnostics.json"));
}

TEST_CASE("resolution output is byte-identical across runs and thread caps") {
  auto a = scratch()("det_a.json"), b = scratch()("det_b.json"), c = scratch()("det_c.json");
  REQUIRE(run("resolve1d --poly '(1/2)*x1^3 + (1/4)*x1' --r 2 --out '" + a + "'") == 0);
  REQUIRE(run("resolve1d --poly '(1/2)*x1^3 + (1/4)*x1' --r 2 --out '" + b + "'") == 0);
  REQUIRE(run("resolve1d --poly '(1/2)*x1^3 + (1/4)*x1' --r 2 --out '" + c + "'",
              "GROMOV_PARAM_THREADS=1") == 0);
  std::string ta = slurp(a);
  CHECK(!ta.empty());
  CHECK(ta == slurp(b));
  CHECK(ta == slurp(c));
  // rationals are serialized as p/q strings, never as floats
  json j = json::parse(ta);
  CHECK(j["domain"]["lo"][0].is_string());
}

TEST_CASE("decompose of the disk") {
  auto in = scratch()("disk.json"), out = scratch()("disk_dec.json");
  put(in, kDisk);
  REQUIRE(run("decompose --in '" + in + "' --out '" + out + "'") == 0);
  json j = json::parse(slurp(out));
  CHECK(j["dim"] == 2);
  CHECK(j["cells"].size() >= 1);
  CHECK(j.contains("presentation"));
  std::string first = slurp(out);
  REQUIRE(run("decompose --in '" + in + "' --out '" + out + "'") == 0);
  CHECK(first == slurp(out));
}

TEST_CASE("resolve2d, verify and report on the disk") {
  auto in = scratch()("disk2.json"), res = scratch()("disk_res.json"), rep = scratch()("disk_rep.json"),
       csv = scratch()("disk.csv");
  put(in, kDisk);
  REQUIRE(run("resolve2d --in '" + in + "' --alpha 0,2 --n 20 --out '" + res + "'") == 0);
  json r = json::parse(slurp(res));
  CHECK(r["dim"] == 2);
  CHECK(r["charts"].size() >= 1);

  REQUIRE(run("verify --res '" + res + "' --target '" + in + "' --samples 2000 --report '" + rep + "'") == 0);
  json v = json::parse(slurp(rep));
  CHECK(v["pass"] == true);
  CHECK(v["gates"].size() == 2);

  REQUIRE(run("report --res '" + res + "' --samples '" + csv + "' --grid 4") == 0);
  auto ls = lines(slurp(csv));
  REQUIRE(ls.size() > 1);
  CHECK(ls[0] == "chart_id,t1,t2,x1,x2");
  std::size_t expected = 1;
  for (const auto& c : r["charts"]) expected += c["source_dim"] == 2 ? 25 : 5;
  CHECK(ls.size() == expected);
}

TEST_CASE("verify defaults to the resolution domain") {
  auto in = scratch()("square.json"), res = scratch()("square_res.json"), rep = scratch()("square_rep.json");
  put(in, kSquare);
  REQUIRE(run("resolve2d --in '" + in + "' --alpha 0,1 --n 1 --out '" + res + "'") == 0);
  REQUIRE(run("verify --res '" + res + "' --samples 500 --report '" + rep + "'") == 0);
  CHECK(json::parse(slurp(rep))["pass"] == true);
}

TEST_CASE("experiment CSV layout") {
  auto csv = scratch()("exp.csv"), rep = scratch()("exp.json");
  REQUIRE(run("experiment --degree 2 --r 1 --buckets 1,1e3 --runs 3 --seed 5 --csv '" + csv + "' --report '" +
              rep + "'") == 0);
  auto ls = lines(slurp(csv));
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "seed,degree,order,bucket,run,N,max_chart_degree,wall_ms");
  CHECK(ls[1].rfind("5,2,1,1,0,", 0) == 0);
  CHECK(json::parse(slurp(rep)).contains("gates"));
}

TEST_CASE("validation errors exit 1 and leave no output") {
  auto out = scratch()("bad.json");
  CHECK(run("resolve1d --poly 'x1^^2' --r 1 --out '" + out + "'") == 1);
  CHECK(run("resolve1d --poly 'x2' --r 1 --out '" + out + "'") == 1);
  CHECK(run("resolve1d --poly 'x1' --out '" + out + "'") == 1);
  CHECK(run("resolve1d --poly 'x1' --r 1 --a 1/2 --b 1/4 --out '" + out + "'") == 1);
  CHECK(run("decompose --in '" + scratch()("missing.json") + "' --out '" + out + "'") == 1);
  CHECK(run("resolve2d --in '" + scratch()("missing.json") + "' --alpha 0,2 --n 3 --out '" + out + "'") == 1);
  CHECK(run("experiment --degree 2 --r 1 --buckets 1,x --csv '" + out + "'") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK_FALSE(fs::exists(out));

  auto garbage = scratch()("garbage.json");
  put(garbage, "{not json");
  CHECK(run("decompose --in '" + garbage + "' --out '" + out + "'") == 1);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("thread cap must be a positive integer") {
  auto out = scratch()("thr.json");
  CHECK(run("resolve1d --poly 'x1' --r 1 --out '" + out + "'", "GROMOV_PARAM_THREADS=0") == 1);
  CHECK(run("resolve1d --poly 'x1' --r 1 --out '" + out + "'", "GROMOV_PARAM_THREADS=abc") == 1);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("resolve1d --poly 'x1' --r 1 --out '" + out + "'", "GROMOV_PARAM_THREADS=2") == 0);
  CHECK(fs::exists(out));
}

TEST_CASE("engine failure exits 2 with diagnostics") {
  auto out = scratch()("limit.json");
  CHECK(run("resolve1d --poly 'x1^2' --r 1 --max-charts 1 --out '" + out + "'") == 2);
  CHECK_FALSE(fs::exists(out));
  REQUIRE(fs::exists(out + ".diagnostics.json"));
  json d = json::parse(slurp(out + ".diagnostics.json"));
  CHECK(d.contains("error"));
}

TEST_CASE("writes are atomic: no temporaries left behind") {
  auto out = scratch()("atomic.json");
  put(out, "old");
  REQUIRE(run("resolve1d --poly 'x1' --r 1 --out '" + out + "'") == 0);
  CHECK(slurp(out) != "old");
  for (const auto& e : fs::directory_iterator(scratch().dir))
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("help exits 0") { CHECK(run("--help") == 0); }
