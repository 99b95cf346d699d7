#include <doctest.h>

#include <random>

#include "ghost/baselines.hpp"
#include "oracles.hpp"

using namespace ghost;

namespace {

std::vector<Vec2> blob(std::mt19937_64& rng, Vec2 c, double sd, std::size_t n) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({c.x + d(rng), c.y + d(rng)});
  return out;
}

ProjectedPoint pp(double x, double y, const Timestamp& t) {
  ProjectedPoint p;
  p.x = x;
  p.y = y;
  p.time = t;
  return p;
}

Timestamp hm(int day, int hour, int minute) { return Timestamp::from_civil(2025, 6, day, hour, minute); }

}  // namespace

TEST_CASE("mean-shift finds separated modes") {
  std::mt19937_64 rng(2);
  auto pts = blob(rng, {0, 0}, 3, 60);
  auto far = blob(rng, {500, 500}, 3, 20);
  pts.insert(pts.end(), far.begin(), far.end());
  auto clusters = mean_shift(pts, 20);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].member_indices.size() == 60);
  CHECK(std::hypot(clusters[0].center.x, clusters[0].center.y) < 3);
  CHECK(clusters[1].member_indices.size() == 20);
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.member_indices.size();
  CHECK(total == pts.size());
}

TEST_CASE("mean-shift converges to the window mean") {
  std::vector<Vec2> pts{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  auto m = mean_shift_converge(pts, {0, 0}, 10);
  CHECK(m.x == doctest::Approx(1.0));
  CHECK(m.y == doctest::Approx(1.0));
}

TEST_CASE("stay points follow sequential extraction") {
  // 30 minutes at A, a jump, 5 minutes at B, then 40 minutes at C.
  std::vector<ProjectedPoint> pts;
  for (int m = 0; m <= 30; m += 5) pts.push_back(pp(1.0 * (m % 2), 0, hm(2, 22, m)));
  pts.push_back(pp(1000, 0, hm(2, 22, 40)));
  pts.push_back(pp(1002, 0, hm(2, 22, 45)));
  for (int m = 0; m <= 40; m += 10) pts.push_back(pp(3000, 5, hm(2, 23, m)));
  auto stays = extract_stay_points(pts, 50, 10);
  REQUIRE(stays.size() == 2);
  CHECK(stays[0].first_index == 0);
  CHECK(stays[0].last_index == 6);
  CHECK(stays[0].dwell_s == 1800.0);
  CHECK(stays[1].center.x == doctest::Approx(3000));
  CHECK(stays[1].dwell_s == 2400.0);
}

TEST_CASE("night overlap clips to the window on every day") {
  const HourWindow night{22, 6};
  // 20:00 -> 08:00 next day: 8 hours of night.
  CHECK(window_overlap_seconds(hm(2, 20, 0), hm(3, 8, 0), night) == 8 * 3600.0);
  // 23:00 -> 01:00 crosses midnight inside the window.
  CHECK(window_overlap_seconds(hm(2, 23, 0), hm(3, 1, 0), night) == 2 * 3600.0);
  // Two full days.
  CHECK(window_overlap_seconds(hm(2, 12, 0), hm(4, 12, 0), night) == 16 * 3600.0);
  CHECK(window_overlap_seconds(hm(2, 12, 0), hm(2, 14, 0), night) == 0.0);
  CHECK(window_overlap_seconds(hm(2, 12, 0), hm(2, 14, 0), {0, 0}) == 2 * 3600.0);
}

TEST_CASE("stay regions link transitively") {
  std::vector<StayPoint> stays(4);
  stays[0].center = {0, 0};
  stays[1].center = {40, 0};
  stays[2].center = {80, 0};
  stays[3].center = {500, 0};
  for (auto& s : stays) {
    s.arrival = hm(2, 23, 0);
    s.departure = hm(3, 1, 0);
    s.dwell_s = 7200;
  }
  auto regions = group_stay_regions(stays, 50, {22, 6});
  REQUIRE(regions.size() == 2);
  CHECK(regions[0].stay_points.size() == 3);
  CHECK(regions[0].centroid.x == doctest::Approx(40));
  CHECK(regions[0].night_dwell_s == 3 * 7200.0);
  CHECK(regions[1].total_dwell_s == 7200.0);
}

TEST_CASE("dbscan matches the O(n^2) reference") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-150, 150);
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<Vec2> pts;
    const auto n = 1 + rng() % 500;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 3 == 0) pts.push_back({u(rng), u(rng)});
      else pts.push_back({std::round(u(rng) / 10) * 10, std::round(u(rng) / 10) * 10});  // exact-distance ties
    }
    const double eps = 5 + static_cast<double>(rng() % 30);
    const int min_pts = 1 + static_cast<int>(rng() % 8);
    CHECK(oracle::same_partition(dbscan_labels(pts, eps, min_pts), oracle::dbscan(pts, eps, min_pts)));
  }
}

TEST_CASE("dbscan counts the query point and uses an inclusive radius") {
  std::vector<Vec2> pts{{0, 0}, {10, 0}, {20, 0}, {100, 0}};
  auto l = dbscan_labels(pts, 10, 3);
  CHECK(l[0] == 0);
  CHECK(l[1] == 0);
  CHECK(l[2] == 0);
  CHECK(l[3] == kNoise);
  auto none = dbscan_labels(pts, 9.99, 2);
  CHECK(std::count(none.begin(), none.end(), kNoise) == 4);
}

TEST_CASE("k-means with k = 1 is the point mean") {
  std::mt19937_64 rng(41);
  for (int inst = 0; inst < 20; ++inst) {
    auto pts = blob(rng, {1e4 * inst, -3e3}, 50, 10 + rng() % 200);
    double sx = 0, sy = 0;
    for (auto& p : pts) {
      sx += p.x;
      sy += p.y;
    }
    const double mx = sx / pts.size(), my = sy / pts.size();
    auto km = kmeans_pp(pts, 1, 42, 10);
    CHECK(std::fabs(km.centroids[0].x - mx) <= 1e-9 * std::max(1.0, std::fabs(mx)));
    CHECK(std::fabs(km.centroids[0].y - my) <= 1e-9 * std::max(1.0, std::fabs(my)));
  }
}

TEST_CASE("k-means separates clusters and is reproducible") {
  std::mt19937_64 rng(43);
  auto pts = blob(rng, {0, 0}, 5, 50);
  auto b = blob(rng, {1000, 0}, 5, 30);
  pts.insert(pts.end(), b.begin(), b.end());
  auto km = kmeans_pp(pts, 2, 7, 5);
  REQUIRE(km.centroids.size() == 2);
  CHECK(km.labels[0] != km.labels[60]);
  auto again = kmeans_pp(pts, 2, 7, 5);
  CHECK(again.labels == km.labels);
  CHECK(again.inertia == km.inertia);
  CHECK_THROWS_AS(kmeans_pp(std::span<const Vec2>(pts.data(), 2), 3, 1, 1), Error);
}

TEST_CASE("frequency picks the most repeated rounded coordinate") {
  UserTrajectory t{"u",
                   {{"u", hm(2, 23, 0), 42.1000001, -71.0},
                    {"u", hm(2, 23, 5), 42.2, -71.1},
                    {"u", hm(2, 23, 10), 42.0999999, -71.0},
                    {"u", hm(3, 1, 0), 42.2, -71.1},
                    {"u", hm(3, 12, 0), 40.0, -70.0},
                    {"u", hm(3, 12, 1), 40.0, -70.0},
                    {"u", hm(3, 12, 2), 40.0, -70.0}}};
  auto e = frequency_detect(t, DetectionParams{});
  REQUIRE(e.detected());
  // Tie of two at each place; the earlier first occurrence wins. Daytime points are ignored.
  CHECK(*e.home_lat == doctest::Approx(42.1));
  CHECK(*e.home_lon == doctest::Approx(-71.0));
}

TEST_CASE("baseline detectors find a planted night home") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> jit(0, 2e-5);
  UserTrajectory t{"u", {}};
  for (int d = 2; d < 12; ++d) {
    for (int h : {22, 23, 0, 1, 2, 3, 4, 5}) {
      const int day = h >= 22 ? d : d + 1;
      for (int m = 0; m < 60; m += 15) t.points.push_back({"u", hm(day, h, m), 42.3 + jit(rng), -71.1 + jit(rng)});
    }
    for (int h = 9; h < 17; ++h) t.points.push_back({"u", hm(d, h, 0), 42.32 + jit(rng), -71.08 + jit(rng)});
  }
  t.sort();
  DetectionParams p;
  for (auto fn : {a1_detect, a2_detect, dbscan_detect, kmeanspp_detect}) {
    auto e = fn(t, p);
    REQUIRE(e.detected());
    CHECK(haversine_m(*e.home_lat, *e.home_lon, 42.3, -71.1) < 5.0);
  }
  UserTrajectory day{"d", {{"d", hm(4, 12, 0), 42.3, -71.1}}};
  CHECK_FALSE(a1_detect(day, p).detected());
  CHECK_FALSE(dbscan_detect(day, p).detected());
  CHECK_FALSE(kmeanspp_detect(day, p).detected());
  CHECK_FALSE(frequency_detect(day, p).detected());
  CHECK_FALSE(a2_detect(day, p).detected());
}
