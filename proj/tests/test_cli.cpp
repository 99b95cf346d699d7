#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "test_util.hpp"

using testutil::read_file;
using testutil::TempDir;
using testutil::write_file;

namespace {

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" GHOST_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string gpx_track(const std::string& day, double lat, double lon) {
  std::string body;
  for (const char* t : {"T22:30:00Z", "T23:10:00Z", "T23:50:00Z"})
    body += "<trkpt lat=\"" + std::to_string(lat) + "\" lon=\"" + std::to_string(lon) + "\"><time>" + day + t +
            "</time></trkpt>";
  return "<?xml version=\"1.0\"?><gpx version=\"1.1\"><trk><trkseg>" + body + "</trkseg></trk></gpx>";
}

}  // namespace

TEST_CASE("usage and configuration errors exit 1") {
  TempDir dir;
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("detect --no-such-flag 3") == 1);
  CHECK(run("detect --input x.csv --grid-size -4") == 1);
  CHECK(run("detect --input x.csv --config " + q(dir / "missing.yaml")) == 1);
  write_file(dir / "bad.yaml", "grid_sz: 50\n");
  CHECK(run("detect --input x.csv --config " + q(dir / "bad.yaml")) == 1);
  CHECK(run("detect --input x.csv", "GHOST_CONFIG=" + q(dir / "bad.yaml")) == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("data errors exit 2") {
  TempDir dir;
  CHECK(run("detect --input " + q(dir / "nope.csv") + " --output-dir " + q(dir.path())) == 2);
  write_file(dir / "broken.gpx", "<gpx><trk><trkseg><trkpt lat=\"1\"");
  CHECK(run("detect --input " + q(dir / "broken.gpx") + " --output-dir " + q(dir.path())) == 2);
  write_file(dir / "r.csv", "garbage\n");
  CHECK(run("export-map --results " + q(dir / "r.csv") + " --output-dir " + q(dir.path())) == 2);
}

TEST_CASE("detect, validate and export-map on generated data") {
  TempDir dir;
  REQUIRE(run("gen-synthetic --users 8 --days 4 --output-dir " + q(dir / "data")) == 0);
  const auto points = q(dir / "data" / "points.csv");
  const auto truth = q(dir / "data" / "truth.csv");

  REQUIRE(run("detect --input " + points + " --output-dir " + q(dir / "a")) == 0);
  REQUIRE(run("detect --input " + points + " --output-dir " + q(dir / "b") + " --threads 1") == 0);
  const auto results = read_file(dir / "a" / "results.csv");
  CHECK(lines(results) == 9);
  CHECK(results == read_file(dir / "b" / "results.csv"));

  REQUIRE(run("validate --results " + q(dir / "a" / "results.csv") + " --ground-truth " + truth + " --output-dir " +
              q(dir / "v")) == 0);
  auto summary = nlohmann::json::parse(read_file(dir / "v" / "validation_summary.json"));
  CHECK(summary["n_evaluated"] == 8);
  CHECK(summary["mae_m"].get<double>() < 25.0);
  CHECK(lines(read_file(dir / "v" / "validation_records.csv")) == 9);

  REQUIRE(run("export-map --results " + q(dir / "a" / "results.csv") + " --input " + points + " --output-dir " +
              q(dir / "m")) == 0);
  auto geo = nlohmann::json::parse(read_file(dir / "m" / "homes.geojson"));
  CHECK(geo["type"] == "FeatureCollection");
  CHECK(geo["features"].size() == 16);
  CHECK(read_file(dir / "m" / "map.html").find("leaflet") != std::string::npos);

  write_file(dir / "cfg.yaml", "algorithm: dbscan\n");
  REQUIRE(run("detect --input " + points + " --output-dir " + q(dir / "c"), "GHOST_CONFIG=" + q(dir / "cfg.yaml")) == 0);
  CHECK(read_file(dir / "c" / "results.csv").find(",dbscan\n") != std::string::npos);
  REQUIRE(run("detect --input " + points + " --algorithm a1 --config " + q(dir / "cfg.yaml") + " --output-dir " +
              q(dir / "d")) == 0);
  CHECK(read_file(dir / "d" / "results.csv").find(",a1\n") != std::string::npos);
}

TEST_CASE("a directory of three GPX users gives three rows") {
  TempDir dir;
  std::filesystem::create_directories(dir / "gpx");
  write_file(dir / "gpx" / "amy.gpx", gpx_track("2025-06-02", 42.30, -71.10));
  write_file(dir / "gpx" / "bo.gpx", gpx_track("2025-06-03", 42.31, -71.11));
  write_file(dir / "gpx" / "cy.gpx", gpx_track("2025-06-04", 42.32, -71.12));
  REQUIRE(run("detect --input " + q(dir / "gpx") + " --output-dir " + q(dir / "out")) == 0);
  const auto csv = read_file(dir / "out" / "results.csv");
  CHECK(lines(csv) == 4);
  CHECK(csv.find("\namy,42.3000000,-71.1000000,night,densest_bin_centroid,") != std::string::npos);
}

TEST_CASE("users without night or weekend data get an empty row") {
  TempDir dir;
  write_file(dir / "p.csv",
             "user_id,timestamp,latitude,longitude\n"
             "day,2025-06-04T12:00:00,42.3,-71.1\n"
             "night,2025-06-04T23:00:00,42.3,-71.1\n");
  REQUIRE(run("detect --input " + q(dir / "p.csv") + " --output-dir " + q(dir.path())) == 0);
  CHECK(read_file(dir / "results.csv").find("\nday,,,none,not_applicable,,,,ghost\n") != std::string::npos);
}

TEST_CASE("sweep writes rows, best profiles and a test summary, reproducibly") {
  TempDir dir;
  REQUIRE(run("gen-synthetic --users 10 --days 3 --output-dir " + q(dir / "data")) == 0);
  write_file(dir / "sweep.yaml",
             "sweep:\n"
             "  ghost:\n"
             "    grid_size: [20, 50, 150, 250]\n"
             "    night_start_hour: [20, 21, 22]\n"
             "    night_end_hour: [5, 6, 7]\n"
             "  a1: {}\n");
  const std::string common = " --input " + q(dir / "data" / "points.csv") + " --ground-truth " +
                             q(dir / "data" / "truth.csv") + " --config " + q(dir / "sweep.yaml");
  REQUIRE(run("sweep" + common + " --output-dir " + q(dir / "s1")) == 0);
  REQUIRE(run("sweep" + common + " --threads 1 --output-dir " + q(dir / "s2")) == 0);
  const auto rows = read_file(dir / "s1" / "sweep_results.csv");
  CHECK(lines(rows) == 37);
  CHECK(rows == read_file(dir / "s2" / "sweep_results.csv"));
  CHECK(read_file(dir / "s1" / "best_ghost.yaml") == read_file(dir / "s2" / "best_ghost.yaml"));
  CHECK_FALSE(std::filesystem::exists(dir / "s1" / "best_a1.yaml"));
  auto summary = nlohmann::json::parse(read_file(dir / "s1" / "sweep_test_summary.json"));
  CHECK(summary["train_users"].size() == 8);
  CHECK(summary["test_users"].size() == 2);
  CHECK(summary["test_reports"].contains("ghost"));

  // The best profile is itself a valid configuration.
  REQUIRE(run("detect --input " + q(dir / "data" / "points.csv") + " --config " + q(dir / "s1" / "best_ghost.yaml") +
              " --output-dir " + q(dir / "d")) == 0);
}

TEST_CASE("generator output is byte-identical across runs") {
  TempDir dir;
  REQUIRE(run("gen-synthetic --users 5 --days 2 --output-dir " + q(dir / "a")) == 0);
  REQUIRE(run("gen-synthetic --users 5 --days 2 --output-dir " + q(dir / "b")) == 0);
  CHECK(read_file(dir / "a" / "points.csv") == read_file(dir / "b" / "points.csv"));
  CHECK(read_file(dir / "a" / "truth.csv") == read_file(dir / "b" / "truth.csv"));
  REQUIRE(run("gen-synthetic --users 5 --days 2 --no-night --output-dir " + q(dir / "c")) == 0);
  CHECK(read_file(dir / "c" / "points.csv") != read_file(dir / "a" / "points.csv"));
}
