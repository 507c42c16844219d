#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "regime_scout/table_io.hpp"

using namespace regime_scout;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + REGIME_SCOUT_BIN + "\" " + args;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(REGIME_SCOUT_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const std::string kConfig = R"({
  "system": {
    "kind": "pendulum",
    "coefficients": {"omega": 1.0, "lambda": 0.0},
    "free_axes": [
      {"name": "x0", "min": -3.5, "max": 3.5},
      {"name": "v0", "min": -2.5, "max": 2.5}
    ],
    "t_f": 200.0,
    "n_t": 1024
  },
  "embedding": {"n_f": 1024, "transient_fraction": 0.0},
  "cluster": {"eps": 15000.0, "min_pts": 3},
  "gp": {"n_starts": 4, "refit_every": 5},
  "stop": {"t_max": 1000},
  "sampling": {"budget": 40, "grid_resolution": 41, "seed": 9}
})";

// one exploration shared by the artifact/plot tests
const fs::path& shared_run() {
  static const fs::path dir = [] {
    const fs::path d = tmp_dir("cli_shared");
    write_text_file(d / "config.json", kConfig);
    REQUIRE(run_cli("explore --config " + q(d / "config.json") + " --out " + q(d / "run")) == 0);
    return d;
  }();
  return dir;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::size_t count_substr(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t at = text.find(what); at != std::string::npos; at = text.find(what, at + 1))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("explore writes the full run directory") {
  const fs::path run = shared_run() / "run";
  for (const char* name : {"samples.csv", "grid.csv", "contours.csv", "embedding_pca.csv",
                           "run_log.jsonl", "report.json"}) {
    INFO(name);
    REQUIRE(fs::exists(run / name));
    CHECK(fs::file_size(run / name) > 0);
  }

  const std::string samples = read_text_file(run / "samples.csv");
  CHECK(count_lines(samples) == 41);  // header + budget rows
  CHECK(samples.rfind("iteration,x0,v0,label,ei\n", 0) == 0);

  const std::string grid = read_text_file(run / "grid.csv");
  CHECK(count_lines(grid) == 41 * 41 + 1);
  CHECK(grid.rfind("x0,v0,mean,std\n", 0) == 0);

  const std::string report = read_text_file(run / "report.json");
  CHECK(report.find("\"stop_reason\": \"budget\"") != std::string::npos);

  // 8 initial samples, then one log line per acquisition
  CHECK(count_lines(read_text_file(run / "run_log.jsonl")) == 32);
}

TEST_CASE("explore reruns are byte-identical") {
  const fs::path dir = shared_run();
  REQUIRE(run_cli("explore --config " + q(dir / "config.json") + " --out " + q(dir / "again")) ==
          0);
  for (const char* name : {"samples.csv", "grid.csv", "contours.csv", "embedding_pca.csv",
                           "run_log.jsonl", "report.json"}) {
    INFO(name);
    CHECK(read_text_file(dir / "run" / name) == read_text_file(dir / "again" / name));
  }
}

TEST_CASE("contour artifact stays on half-integer levels inside the box") {
  const fs::path run = shared_run() / "run";
  const CsvTable table = read_csv(run / "contours.csv");
  REQUIRE(table.header == std::vector<std::string>{"level", "polyline", "x0", "v0"});

  const std::string report = read_text_file(run / "report.json");
  const auto at = report.find("\"n_regimes\": ");
  REQUIRE(at != std::string::npos);
  const int n_regimes = std::atoi(report.c_str() + at + 13);
  REQUIRE(n_regimes >= 2);  // libration and rotation

  std::vector<double> levels;
  for (const auto& row : table.rows) {
    const double level = std::stod(row.at(0));
    if (levels.empty() || levels.back() != level) levels.push_back(level);
    CHECK(level - std::floor(level) == 0.5);
    CHECK(level < n_regimes - 1);
    const double x = std::stod(row.at(2)), v = std::stod(row.at(3));
    CHECK((x >= -3.5 && x <= 3.5));
    CHECK((v >= -2.5 && v <= 2.5));
  }
  CHECK(!table.rows.empty());
}

TEST_CASE("invalid axis bounds exit 2 and name the key") {
  const fs::path dir = tmp_dir("cli_badaxis");
  std::string bad = kConfig;
  bad.replace(bad.find("\"min\": -3.5"), 11, "\"min\": 9.0");
  write_text_file(dir / "config.json", bad);
  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("explore --config " + q(dir / "config.json") + " --out " + q(dir / "run") +
                " 2> " + q(err)) == 2);
  CHECK(read_text_file(err).find("system.free_axes[0]") != std::string::npos);
}

TEST_CASE("unknown config keys exit 2 with their path") {
  const fs::path dir = tmp_dir("cli_unknown");
  std::string bad = kConfig;
  bad.replace(bad.find("\"eps\""), 5, "\"epsilon\"");
  write_text_file(dir / "config.json", bad);
  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("explore --config " + q(dir / "config.json") + " --out " + q(dir / "run") +
                " 2> " + q(err)) == 2);
  CHECK(read_text_file(err).find("cluster.epsilon") != std::string::npos);
}

TEST_CASE("simulate writes one row per time step") {
  const fs::path dir = tmp_dir("cli_simulate");
  write_text_file(dir / "config.json", kConfig);
  REQUIRE(run_cli("simulate --config " + q(dir / "config.json") + " --theta 0,0 --out " +
                  q(dir / "traj.csv")) == 0);

  const CsvTable table = read_csv(dir / "traj.csv");
  REQUIRE(table.header == std::vector<std::string>{"t", "x"});
  REQUIRE(table.rows.size() == 1024);
  CHECK(std::stod(table.rows.front().at(0)) == 0.0);
  CHECK(std::stod(table.rows.back().at(0)) == Catch::Approx(200.0));
  for (std::size_t i = 0; i < table.rows.size(); i += 100)
    CHECK(std::stod(table.rows[i].at(1)) == 0.0);  // bottom equilibrium stays put
}

TEST_CASE("simulate rejects a theta outside the box") {
  const fs::path dir = tmp_dir("cli_simbad");
  write_text_file(dir / "config.json", kConfig);
  CHECK(run_cli("simulate --config " + q(dir / "config.json") + " --theta 9,9 --out " +
                q(dir / "traj.csv") + " 2> /dev/null") == 2);
}

TEST_CASE("oracle grades the whole lattice") {
  const fs::path dir = tmp_dir("cli_oracle");
  write_text_file(dir / "config.json", kConfig);
  REQUIRE(run_cli("oracle --config " + q(dir / "config.json") + " --grid 5 --out " +
                  q(dir / "oracle.csv")) == 0);

  const CsvTable table = read_csv(dir / "oracle.csv");
  REQUIRE(table.header == std::vector<std::string>{"x0", "v0", "oracle_label"});
  REQUIRE(table.rows.size() == 25);
  for (const auto& row : table.rows) {
    const int label = std::stoi(row.at(2));
    CHECK((label == 0 || label == 1));
  }
  CHECK(table.rows[0].at(2) == "1");   // (-3.5, -2.5): above the separatrix energy
  CHECK(table.rows[12].at(2) == "0");  // (0, 0): resting in the well
}

TEST_CASE("regime figure marks every sample") {
  const fs::path run = shared_run() / "run";
  const fs::path fig = shared_run() / "regimes.svg";
  REQUIRE(run_cli("plot --run " + q(run) + " --fig regimes --out " + q(fig)) == 0);
  const std::string svg = read_text_file(fig);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count_substr(svg, "<circle") == 40);

  const fs::path fig2 = shared_run() / "regimes2.svg";
  REQUIRE(run_cli("plot --run " + q(run) + " --fig regimes --out " + q(fig2)) == 0);
  CHECK(read_text_file(fig2) == svg);
}

TEST_CASE("pca figure marks every embedded sample") {
  const fs::path run = shared_run() / "run";
  const fs::path fig = shared_run() / "pca.svg";
  REQUIRE(run_cli("plot --run " + q(run) + " --fig pca --out " + q(fig)) == 0);
  // the pendulum never blows up, so every sample embeds
  CHECK(count_substr(read_text_file(fig), "<circle") == 40);
}

TEST_CASE("remaining figures render and bad names do not") {
  const fs::path run = shared_run() / "run";
  for (const char* fig : {"uncertainty", "surface"}) {
    const fs::path out = shared_run() / (std::string(fig) + ".svg");
    CHECK(run_cli("plot --run " + q(run) + " --fig " + fig + " --out " + q(out)) == 0);
    CHECK(read_text_file(out).rfind("<svg", 0) == 0);
  }
  CHECK(run_cli("plot --run " + q(run) + " --fig pie --out " + q(shared_run() / "pie.svg") +
                " 2> /dev/null") == 2);
}

TEST_CASE("usage errors exit 2 and help exits 0") {
  CHECK(run_cli("explore 2> /dev/null") == 2);
  CHECK(run_cli("--help > /dev/null") == 0);
  CHECK(run_cli("2> /dev/null") == 2);  // a subcommand is required
}
