#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "ghost/metrics.hpp"
#include "test_util.hpp"

using namespace ghost;

namespace {

HomeEstimate at(const std::string& id, double lat, double lon) {
  HomeEstimate e = HomeEstimate::undetected(id, Algorithm::Ghost);
  e.home_lat = lat;
  e.home_lon = lon;
  e.inference_source = InferenceSource::Night;
  e.refinement_method = RefinementMethod::DensestBinCentroid;
  return e;
}

}  // namespace

TEST_CASE("error aggregates on small vectors") {
  const std::vector<double> e{3, 4};
  CHECK(std::fabs(mean_error(e) - 3.5) <= 1e-12);
  CHECK(std::fabs(rms_error(e) - std::sqrt(12.5)) <= 1e-12);
  CHECK(median_error({1, 2, 9}) == 2.0);
  CHECK(median_error({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("rmse never falls below mae") {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> d(0.05);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> e(1 + rng() % 100);
    for (auto& x : e) x = d(rng);
    CHECK(rms_error(e) >= mean_error(e) - 1e-12);
  }
}

TEST_CASE("score uses haversine, tracks missing users and hit rates") {
  GroundTruth truth{{"a", {0, 0}}, {"b", {0, 0}}, {"c", {1, 1}}};
  // 0.0009 degrees of longitude at the equator is about 100.075 m.
  std::vector<HomeEstimate> est{at("b", 0, 0.0009), at("a", 0, 0), HomeEstimate::undetected("c", Algorithm::Ghost),
                                at("zz", 0, 0)};
  auto r = score(est, truth);
  CHECK(r.n_evaluated == 2);
  CHECK(r.n_missing == 2);
  CHECK(r.missing_users == std::vector<std::string>{"c", "zz"});
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].user_id == "a");
  const double d = haversine_m(0, 0, 0, 0.0009);
  CHECK(r.mae_m == doctest::Approx(d / 2));
  CHECK(r.hit_rates.at(50) == 0.5);
  CHECK(r.hit_rates.at(100) == 0.5);
  CHECK(r.hit_rates.at(250) == 1.0);

  std::vector<HomeEstimate> nobody{HomeEstimate::undetected("a", Algorithm::Ghost)};
  CHECK_THROWS_AS(score(nobody, truth), Error);
}

TEST_CASE("hit threshold is inclusive") {
  GroundTruth truth{{"a", {0, 0}}};
  std::vector<HomeEstimate> est{at("a", 0, 0.0009)};
  const double d = haversine_m(0, 0, 0, 0.0009);
  std::vector<double> th{d};
  CHECK(score(est, truth, th).hit_rates.at(d) == 1.0);
}

TEST_CASE("ground truth file handling") {
  testutil::TempDir dir;
  GroundTruth truth{{"a", {42.1, -71.2}}, {"b", {-33.9, 151.2}}};
  write_ground_truth(dir / "t.csv", truth);
  auto back = load_ground_truth(dir / "t.csv");
  CHECK(back.size() == 2);
  CHECK(back.at("b").lon == doctest::Approx(151.2));

  auto kind = [&](const std::string& text) {
    testutil::write_file(dir / "x.csv", text);
    try {
      load_ground_truth(dir / "x.csv");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::EmptyInput;
  };
  CHECK(kind("user_id,latitude,longitude\na,1,2\na,1,2\n") == ErrorKind::DuplicateUser);
  CHECK(kind("user_id,latitude,longitude\na,100,2\n") == ErrorKind::CoordinateOutOfRange);
  CHECK(kind("user_id,lat,lon\na,1,2\n") == ErrorKind::MissingHeader);
  CHECK_THROWS_AS(load_ground_truth(dir / "nope.csv"), Error);
}

TEST_CASE("summary json carries the aggregates") {
  GroundTruth truth{{"a", {0, 0}}};
  std::vector<HomeEstimate> est{at("a", 0, 0)};
  auto j = nlohmann::json::parse(report_summary_json(score(est, truth)));
  CHECK(j["n_evaluated"] == 1);
  CHECK(j["mae_m"] == 0.0);
  CHECK(j["hit_rates"]["50"] == 1.0);
}
