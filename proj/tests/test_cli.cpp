#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Black-box checks of the command line tool; LANEMERGE_BIN points at the
// built binary.

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(LANEMERGE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lanemerge-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

}  // namespace

TEST_CASE("usage and argument errors exit nonzero") {
  CHECK(run("--help") == 0);
  CHECK(run("") != 0);                      // a subcommand is required
  CHECK(run("no-such-command") != 0);
  CHECK(run("extract") != 0);               // missing --input
  CHECK(run("train --input /nonexistent.csv") != 0);
}

TEST_CASE("raw data flows through extract, label, train and sweep") {
  TempDir dir;
  const auto raw = dir.file("raw.csv");
  const auto windows = dir.file("windows.jsonl");
  const auto labeled = dir.file("labeled.csv");

  REQUIRE(run("synth-raw --output " + raw + " --events 6 --seed 11") == 0);
  CHECK(line_count(raw) == 1 + 6 * 3 * 100);  // header + three tracks of 100 rows

  SUBCASE("dry runs report without writing") {
    CHECK(run("extract --input " + raw + " --dry-run") == 0);
    CHECK_FALSE(fs::exists(windows));
    // without --dry-run an output path is mandatory
    CHECK(run("extract --input " + raw) != 0);
  }

  SUBCASE("full pipeline") {
    REQUIRE(run("extract --input " + raw + " --output " + windows) == 0);
    CHECK(line_count(windows) == 6);

    REQUIRE(run("label --input " + windows + " --output " + labeled) == 0);
    CHECK(line_count(labeled) == 1 + 6 * 70);  // header + one row per window sample

    const auto metrics = dir.file("metrics.csv");
    REQUIRE(run("train --input " + labeled + " --algorithm decision-tree --label merge --output " +
                metrics) == 0);
    CHECK(line_count(metrics) == 2);  // header + the one algorithm

    const auto model = dir.file("tree.model");
    REQUIRE(run("train --input " + labeled + " --algorithm decision-tree --label merge --model " +
                model) == 0);
    CHECK(fs::exists(model));
    CHECK(run("evaluate --input " + labeled + " --model " + model + " --label merge") == 0);

    const auto sweep_csv = dir.file("sweep.csv");
    REQUIRE(run("sweep --input " + labeled +
                " --algorithm decision-tree --label merge --parameter depth --max 5 --output " +
                sweep_csv) == 0);
    CHECK(line_count(sweep_csv) == 1 + 5);  // header + one row per depth
  }
}

TEST_CASE("failures leave no partial outputs behind") {
  TempDir dir;
  const auto windows = dir.file("windows.jsonl");
  CHECK(run("extract --input /nonexistent.csv --output " + windows) != 0);
  CHECK_FALSE(fs::exists(windows));

  CHECK(run("evaluate --input /nonexistent.csv --model /nonexistent.model") != 0);
  CHECK(run("train --input /nonexistent.csv --algorithm all --model " + dir.file("x.model")) != 0);
}

TEST_CASE("synthetic traces support the dry-run bitrate report") {
  TempDir dir;
  const auto trace = dir.file("trace.jsonl");
  REQUIRE(run("synth-trace --output " + trace + " --seed 9") == 0);
  CHECK(line_count(trace) == 1 + 210);  // meta line + updates

  CHECK(run("replay --input " + trace + " --dry-run") == 0);
  CHECK(run("replay --input /nonexistent.jsonl --dry-run") != 0);
}
