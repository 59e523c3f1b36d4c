#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("mlab-cli-" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
  std::string read(const std::string& file) const {
    std::ifstream in(dir / file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

int run(const std::string& args, const Sandbox& box) {
  const std::string cmd = std::string(MLAB_BINARY) + " " + args + " > " + (box.dir / "stdout.txt").string() +
                          " 2> " + (box.dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("check subcommand writes a report") {
  Sandbox box("check");
  const std::string cfg = box.write("run.ini", "[grid]\nresolutions = 128, 256\n");
  REQUIRE(run("check CHK-SIGMA CHK-TRIV-COMM --config " + cfg + " --out " + (box.dir / "out").string(), box) == 0);
  const auto report = nlohmann::json::parse(box.read("out/report.json"));
  CHECK(report["toolkit_version"] == "1.0.0");
  CHECK(report["checks"].size() == 2);
  CHECK(report["checks"][0]["verdict"] == "PASS");
  CHECK(report["summary"]["exit_code"] == 0);
  CHECK(box.read("out/summary.csv").rfind("check,N,max_ratio,trend,verdict,expected,seconds", 0) == 0);
}

TEST_CASE("exit codes") {
  Sandbox box("codes");
  const std::string good = box.write("good.ini", "[grid]\nresolutions = 128, 256\n");
  CHECK(run("check CHK-DOES-NOT-EXIST --config " + good + " --out " + box.dir.string(), box) == 2);
  CHECK(box.read("stderr.txt").find("CHK-SIGMA") != std::string::npos);  // lists known ids
  const std::string bad = box.write("bad.ini", "[params]\nalpha = 0.5\np = 2\nbogus = 1\n");
  CHECK(run("check CHK-SIGMA --config " + bad, box) == 2);
  const std::string err = box.read("stderr.txt");
  CHECK(err.find("q = ∞ not supported") != std::string::npos);
  CHECK(err.find("unknown key 'params.bogus'") != std::string::npos);
  CHECK(run("frobnicate", box) == 2);
  CHECK(run("check --config /nonexistent.ini CHK-SIGMA", box) == 2);
}

TEST_CASE("failed hypotheses are reported as gated, not as failures") {
  Sandbox box("gated");
  const std::string cfg = box.write("run.ini", "[grid]\nresolutions = 128, 256\n[params]\nweight = power:1\n");
  REQUIRE(run("sweep CHK-THM1 --config " + cfg + " --out " + box.dir.string(), box) == 0);
  const auto report = nlohmann::json::parse(box.read("report.json"));
  CHECK(report["checks"][0]["verdict"] == "hypothesis-gated");
  CHECK_FALSE(report["checks"][0]["details"]["gate_reason"].get<std::string>().empty());
}

TEST_CASE("membership subcommand") {
  Sandbox box("ap");
  const std::string cfg = box.write(
      "run.ini", "[grid]\nresolutions = 128, 256\n[balls]\norigin_only = true\n[params]\nweight = power:-0.5\n");
  REQUIRE(run("ap --config " + cfg + " --out " + box.dir.string(), box) == 0);
  CHECK(nlohmann::json::parse(box.read("report.json"))["results"].size() == 4);
  REQUIRE(run("rh --config " + cfg + " --out " + box.dir.string(), box) == 0);
  const auto report = nlohmann::json::parse(box.read("report.json"));
  CHECK(report["critical_index"]["value"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("apply subcommand writes input and output grids") {
  Sandbox box("apply");
  const std::string cfg =
      box.write("run.ini", "[grid]\nN = 64\nR = 4\n[params]\noperator = riesz\nalpha = 0.5\np = 1.5\nkappa = 0\n");
  REQUIRE(run("apply --config " + cfg + " --out " + box.dir.string(), box) == 0);
  CHECK(fs::exists(box.dir / "input.csv"));
  CHECK(fs::exists(box.dir / "output.csv"));
}
