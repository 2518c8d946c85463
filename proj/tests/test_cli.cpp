#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <set>
#include <sys/wait.h>
#include <unistd.h>
#include <algorithm>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string &args, const std::string &env = "") {
  std::string cmd = env + " " + MUNCHKIN_BIN + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("munchkin-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string &name) const { return (path / name).string(); }
  static inline int counter = 0;
};

} // namespace

TEST_CASE("generate then callgraph depths") {
  TempDir tmp;
  auto g = run("generate --branching 2 --depth 3 --out " + (tmp / "p.mir"));
  CHECK(g.code == 0);
  auto cg = run("callgraph " + (tmp / "p.mir") + " --depths");
  CHECK(cg.code == 0);
  CHECK(lines(cg.out) == 16);
  CHECK(cg.out.find("main\t0\n") != std::string::npos);
  auto dot = run("callgraph " + (tmp / "p.mir") + " --dot");
  CHECK(dot.out.rfind("digraph", 0) == 0);
}

TEST_CASE("help and usage errors") {
  auto help = run("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("generate --branching 2").code == 1);
  CHECK(run("generate --branching 1 --depth 2 --out /dev/null").code == 1);
  CHECK(run("symex /nonexistent.mir").code == 1);
}

TEST_CASE("bad program text is a campaign failure") {
  TempDir tmp;
  std::ofstream(tmp / "bad.mir") << "program p\nfunc main()\nblock a:\n  call nope()\n  ret\n";
  CHECK(run("symex " + (tmp / "bad.mir") + " --out " + (tmp / "o")).code == 2);
}

TEST_CASE("fuzz writes its corpus under --out only") {
  TempDir tmp;
  run("generate -b 3 -d 2 --out " + (tmp / "p.mir"));
  fs::create_directories(tmp.path / "seeds");
  std::ofstream(tmp / "seeds/a.txt") << "4\n";
  auto r = run("fuzz " + (tmp / "p.mir") + " --seeds " + (tmp / "seeds") +
               " --budget 300 --rng-seed 3 --out " + (tmp / "f"));
  REQUIRE(r.code == 0);
  std::size_t ids = 0;
  for (const auto &e : fs::directory_iterator(tmp.path / "f" / "corpus")) {
    auto name = e.path().filename().string();
    CHECK((name.rfind("id-", 0) == 0 || name.rfind("seed-", 0) == 0));
    ids += name.rfind("id-", 0) == 0;
  }
  CHECK(ids > 0);
  CHECK(slurp(tmp.path / "f" / "corpus" / "seed-0.txt") == "4\n");
  std::set<std::string> top;
  for (const auto &e : fs::directory_iterator(tmp.path))
    top.insert(e.path().filename().string());
  CHECK(top == std::set<std::string>{"f", "p.mir", "seeds"});
}

TEST_CASE("symex and hybrid outputs") {
  TempDir tmp;
  run("generate -b 2 -d 3 --out " + (tmp / "p.mir"));
  auto s = run("symex " + (tmp / "p.mir") + " --search sonar --target leaf_6 --out " + (tmp / "s"));
  REQUIRE(s.code == 0);
  auto summary = nlohmann::json::parse(slurp(tmp.path / "s" / "summary.json"));
  CHECK(summary.at("target_reached") == true);
  CHECK(run("symex " + (tmp / "p.mir") + " --search sonar --out " + (tmp / "s2")).code == 1);
  CHECK(run("symex " + (tmp / "p.mir") + " --search sonar --target zzz --out " + (tmp / "s3")).code == 1);

  auto h = run("hybrid " + (tmp / "p.mir") + " --mode fs --fuzz-budget 20 --out " + (tmp / "h"));
  REQUIRE(h.code == 0);
  auto report = nlohmann::json::parse(slurp(tmp.path / "h" / "report.json"));
  CHECK(report.at("technique") == "FS");
  CHECK(report.at("coverage").at("covered") == 16);
  CHECK(fs::exists(tmp.path / "h" / "report-depth.tsv"));
  CHECK(run("hybrid " + (tmp / "p.mir") + " --mode xx --out " + (tmp / "h2")).code == 1);
  CHECK(run("hybrid " + (tmp / "p.mir") + " --per-target-queries 0 --out " + (tmp / "h3")).code == 1);
}

TEST_CASE("report subcommand") {
  TempDir tmp;
  run("generate -b 2 -d 2 --out " + (tmp / "p.mir"));
  auto p = tmp / "p.mir";
  REQUIRE(run("hybrid " + p + " --mode fs --fuzz-budget 5 --out " + (tmp / "fs")).code == 0);
  REQUIRE(run("hybrid " + p + " --mode sf --out " + (tmp / "sf")).code == 0);
  REQUIRE(run("baselines " + p + " --fuzz-budget 5 --out " + (tmp / "b")).code == 0);
  auto r = run("report " + (tmp / "fs/report.json") + " " + (tmp / "sf/report.json") + " " +
               (tmp / "b/fuzz-only.json") + " " + (tmp / "b/symex-only.json") +
               " --program " + p + " --out " + (tmp / "r"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("Depth  SymexOnly (%)  AFL-like (%)  FS (%)  SF (%)\n", 0) == 0);
  auto dat = slurp(tmp.path / "r" / "plot-gen_b2_d2.dat");
  CHECK(lines(dat) == 4);
  CHECK(fs::exists(tmp.path / "r" / "intersections.json"));
  auto avg = run("report --average " + (tmp / "r/plot-gen_b2_d2.dat") + " --out " + (tmp / "avg"));
  CHECK(avg.code == 0);
  CHECK(slurp(tmp.path / "avg" / "plot-avg.dat") == dat);
  CHECK(run("report " + (tmp / "fs/report.json") + " --out " + (tmp / "r2")).code == 1);
}

TEST_CASE("config file and flag precedence") {
  TempDir tmp;
  run("generate -b 2 -d 2 --out " + (tmp / "p.mir"));
  std::ofstream(tmp / "c.toml") << "[hybrid]\nfuzz-budget = 7\nmode = \"fs\"\n";
  run("--config " + (tmp / "c.toml") + " hybrid " + (tmp / "p.mir") + " --out " + (tmp / "a"));
  auto a = nlohmann::json::parse(slurp(tmp.path / "a" / "report.json"));
  CHECK(a.at("executions") == 8);
  run("--config " + (tmp / "c.toml") + " hybrid " + (tmp / "p.mir") +
      " --fuzz-budget 9 --out " + (tmp / "b"));
  auto b = nlohmann::json::parse(slurp(tmp.path / "b" / "report.json"));
  CHECK(b.at("executions") == 10);
}

TEST_CASE("MUNCHKIN_OUT is the default output root") {
  TempDir tmp;
  auto g = run("generate -b 2 -d 1", "MUNCHKIN_OUT=" + tmp.path.string());
  CHECK(g.code == 0);
  CHECK(fs::exists(tmp.path / "gen_b2_d1.mir"));
  run("symex " + (tmp / "gen_b2_d1.mir"), "MUNCHKIN_OUT=" + tmp.path.string());
  CHECK(fs::exists(tmp.path / "symex" / "summary.json"));
}

TEST_CASE("table1 is reproducible") {
  auto a = run("table1 --rng-seed 7");
  auto b = run("table1 --rng-seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out) == 13);
  CHECK(a.out.find("P12") != std::string::npos);
}
