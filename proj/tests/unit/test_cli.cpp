#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SCHREIER_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) {
    r.out.append(buf.data(), n);
  }
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Json json_of(const Run& r) { return Json::parse(r.out); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("schreier-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("membership and malformed input") {
  auto r = run("schreier member --alpha w --set 3,4,5");
  CHECK(r.code == 0);
  CHECK(json_of(r)["member"] == true);
  CHECK(json_of(r)["tool"] == "schreier");
  r = run("schreier member --alpha 1 --set 2,3,4");
  CHECK(r.code == 0);
  CHECK(json_of(r)["member"] == false);
  CHECK(run("schreier member --alpha 'w+' --set 3").code == 1);
  CHECK(run("schreier member --alpha 1 --set 3,2").code == 1);
  CHECK(run("schreier bogus").code != 0);
  r = run("schreier count --alpha 1 --universe 12");
  CHECK(r.code == 0);
  CHECK(json_of(r)["count"] == 377);
  r = run("schreier enum --alpha 1 --universe 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("[\n      2,\n      3\n    ]") != std::string::npos);
  r = run("schreier enum --alpha 1 --universe 4 --format text");
  CHECK(r.code == 0);
  CHECK(r.out == "{}\n1\n2\n2,3\n2,4\n3\n3,4\n4\n");
  r = run("schreier count --alpha 1 --universe 12 --format text");
  CHECK(r.code == 0);
  CHECK(r.out == "377\n");
}

TEST_CASE("game verify and solve") {
  TempDir tmp;
  auto r = run("game verify --spec 1,1 --family s:1 --universe 8 --policy minlast");
  CHECK(r.code == 0);
  CHECK(json_of(r)["wins"] == true);
  r = run("game verify --spec 1,1 --family s:1 --universe 8 --policy const:1");
  CHECK(r.code == 1);
  CHECK(json_of(r)["wins"] == false);
  r = run("game solve --spec 1,1 --family s:1 --universe 8 --require-clean --out " +
          tmp / "s.json");
  CHECK(r.code == 0);
  r = run("game verify --spec 1,1 --family s:1 --universe 8 --strategy " + tmp / "s.json");
  CHECK(r.code == 0);
  r = run("game solve --spec 1 --family s:1 --universe 12 --n-budget 6 --require-clean");
  CHECK(r.code == 0);
  CHECK(json_of(r)["n_wins"] == false);
  CHECK(json_of(r)["value"] == "s_wins");
}

TEST_CASE("spreading maps") {
  TempDir tmp;
  auto r = run("spreadmap build --spec 1 --policy const:3 --budget 8 --out " + tmp / "m.json");
  CHECK(r.code == 0);
  const Json m = Json::parse(slurp(tmp.path / "m.json"));
  CHECK(m["table"][0] == 6);
  CHECK(run("spreadmap verify --map " + tmp / "m.json").code == 0);
  CHECK(run("spreadmap verify --map " + tmp / "m.json --policy const:8").code == 1);
}

TEST_CASE("embedding certificates") {
  TempDir tmp;
  std::ofstream(tmp.path / "fam.txt") << "{}\n1\n2\n1,2\n3\n4\n3,4\n";
  auto r = run("embed build --family file:" + tmp / "fam.txt" + " --spec 1 --universe 4 --out " +
               tmp / "c.json");
  REQUIRE(r.code == 0);
  CHECK(run("embed verify --cert " + tmp / "c.json").code == 0);
  Json c = Json::parse(slurp(tmp.path / "c.json"));
  auto& n = c["N"];
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = i + 1;
  }
  std::ofstream(tmp.path / "bad.json") << c.dump(2);
  CHECK(run("embed verify --cert " + tmp / "bad.json").code == 1);
}

TEST_CASE("dichotomy and example") {
  auto r = run("dichotomy run --family random:3 --spec 1 --universe 10");
  CHECK(r.code == 0);
  CHECK(json_of(r)["outcome"] != "undecided_at_truncation");
  r = run("example amt --kmax 3 --check");
  CHECK(r.code == 0);
  CHECK(json_of(r)["check"]["status"] == "ok");
  CHECK(json_of(r)["check"]["F_not_in_S1"]["witness"] == Json::parse("[1,3]"));
  r = run("example amt --kmax 4 --m 3,5,7,9,11,13,15,17,19,21 --check");
  CHECK(r.code == 2);
  CHECK(json_of(r)["check"]["status"] == "insufficient_prefix");
}

TEST_CASE("ranks") {
  auto r = run("cb index --family s:1");
  CHECK(r.code == 0);
  CHECK(json_of(r)["index"] == "w+1");
  r = run("cb rank --family s:1 --set 4");
  CHECK(r.code == 0);
  CHECK(json_of(r)["rank"] == "3");
  CHECK(run("cb rank --family s:1 --set 2,3,4").code == 1);
}

TEST_CASE("artifacts are deterministic") {
  TempDir tmp;
  for (const std::string args : {"dichotomy run --family random:5 --spec 1 --universe 10 --depth 2",
                                 "spreadmap build --spec w --policy const:2 --budget 8",
                                 "example amt --kmax 3 --check --seed 9"}) {
    CAPTURE(args);
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}
