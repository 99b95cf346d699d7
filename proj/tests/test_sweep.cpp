#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ghost/sweep.hpp"
#include "ghost/synthetic.hpp"

using namespace ghost;

namespace {

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("user_" + std::to_string(i));
  return out;
}

const SynthDataset& small_data() {
  static const SynthDataset d = [] {
    SynthSpec s;
    s.n_users = 6;
    s.days = 5;
    return generate(s);
  }();
  return d;
}

}  // namespace

TEST_CASE("sensitivity ranges have the published sizes") {
  const auto g = ParamGrid::sensitivity_ranges();
  std::map<Algorithm, std::size_t> n;
  for (const auto& a : g.algorithms) n[a.algorithm] = a.combinations();
  CHECK(n.at(Algorithm::Ghost) == 36);
  CHECK(n.at(Algorithm::A1) == 36);
  CHECK(n.at(Algorithm::A2) == 432);
  CHECK(n.at(Algorithm::Dbscan) == 108);
  CHECK(n.at(Algorithm::KMeansPP) == 81);
  CHECK(n.at(Algorithm::Frequency) == 9);
}

TEST_CASE("combinations enumerate row-major") {
  AlgorithmGrid g{Algorithm::Ghost, {{"grid_size", {20, 50}}, {"night_start_hour", {20, 21, 22}}, {"night_end_hour", {5, 6, 7}}}};
  CHECK(g.combinations() == 18);
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < g.combinations(); ++i) {
    auto c = g.combination(i);
    REQUIRE(c.size() == 3);
    seen.insert({c[0].second, c[1].second, c[2].second});
  }
  CHECK(seen.size() == 18);
  auto first = g.combination(0), second = g.combination(1), last = g.combination(17);
  CHECK(first[2].second == 5);
  CHECK(second[2].second == 6);
  CHECK(second[0].second == 20);
  CHECK(last[0].second == 50);
}

TEST_CASE("parameter keys round-trip through set/get") {
  for (const auto& k : sweep_parameter_keys()) {
    DetectionParams p;
    set_parameter(p, k, 7);
    CHECK(get_parameter(p, k) == 7);
  }
  DetectionParams p;
  CHECK_THROWS_AS(set_parameter(p, "grid_sz", 1), Error);
  CHECK_THROWS_AS(set_parameter(p, "dbscan.min_pts", 2.5), Error);
}

TEST_CASE("user split is deterministic, disjoint and order-independent") {
  auto s = split_users(ids(10), 0.8, 42);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  auto again = split_users(ids(10), 0.8, 42);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto shuffled = ids(37);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto p = split_users(shuffled, 0.8, 42);
    auto base = split_users(ids(37), 0.8, 42);
    CHECK(p.train == base.train);
    CHECK(p.test == base.test);
    CHECK(p.train.size() == 30);
    std::set<std::string> tr(p.train.begin(), p.train.end());
    for (const auto& t : p.test) CHECK(tr.count(t) == 0);
    CHECK(tr.size() + p.test.size() == 37);
  }
  CHECK(split_users(ids(10), 0.8, 7).train != s.train);
  CHECK_THROWS_AS(split_users(ids(1), 0.8, 42), Error);
  CHECK_THROWS_AS(split_users(ids(10), 1.0, 42), Error);
}

TEST_CASE("sweep selects the minimum training error") {
  const auto& d = small_data();
  ParamGrid g{{{Algorithm::Ghost, {{"grid_size", {1, 20, 50, 250}}, {"night_end_hour", {5, 6}}}},
               {Algorithm::Dbscan, {{"dbscan.eps_m", {20}}}}}};
  auto r = run_sweep(d.users, d.truth, g);
  REQUIRE(r.rows.size() == 9);
  CHECK(r.rows[0].params[0].second == 1);
  CHECK(r.rows.back().algorithm == Algorithm::Dbscan);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 8; ++i)
    if (r.rows[i].train_mae_m < r.rows[best].train_mae_m) best = i;
  CHECK(r.best_row.at(Algorithm::Ghost) == best);
  CHECK(r.best_row.at(Algorithm::Dbscan) == 8);
  CHECK(r.rows[8].resolved.dbscan.eps_m == 20);
  for (const auto& row : r.rows) CHECK(row.n_evaluated == 6);
}

TEST_CASE("parallel sweep equals the serial reference") {
  const auto& d = small_data();
  ParamGrid g{{{Algorithm::Ghost, {{"grid_size", {20, 50}}}},
               {Algorithm::KMeansPP, {{"kmeans.k", {1, 2}}, {"kmeans.random_state", {1, 2}}}},
               {Algorithm::A2, {{"a2.stay_time_min", {10, 25}}}}}};
  const auto serial = sweep_csv(run_sweep_serial(d.users, d.truth, g));
  for (int threads : {1, 2, 4}) CHECK(sweep_csv(run_sweep(d.users, d.truth, g, {}, threads)) == serial);
}

TEST_CASE("rows with nothing evaluable are kept but never best") {
  const auto& d = small_data();
  GroundTruth none;
  ParamGrid g{{{Algorithm::Ghost, {{"grid_size", {50}}}}}};
  auto r = run_sweep(d.users, none, g);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].n_evaluated == 0);
  CHECK(r.best_row.empty());
  CHECK(sweep_csv(r).find("\nghost,50," + std::string(12, ',') + ",,,0\n") != std::string::npos);
}

TEST_CASE("frozen profiles encode the published values") {
  auto g = frozen_profile(Algorithm::Ghost);
  CHECK(g.grid_size == 50);
  CHECK(g.night_start_hour == 22);
  CHECK(g.night_end_hour == 6);
  auto db = frozen_profile(Algorithm::Dbscan);
  CHECK(db.dbscan.eps_m == 20);
  CHECK(db.dbscan.min_pts == 4);
  CHECK(db.night_start_hour == 21);
  CHECK(db.night_end_hour == 5);
  auto a1 = frozen_profile(Algorithm::A1);
  CHECK(a1.a1.bandwidth_m == 20);
  CHECK(a1.night_start_hour == 22);
  CHECK(a1.night_end_hour == 5);
  auto a2 = frozen_profile(Algorithm::A2);
  CHECK(a2.a2 == A2Params{50, 10, 50});
  CHECK(a2.night_start_hour == 20);
  CHECK(a2.night_end_hour == 5);
  auto km = frozen_profile(Algorithm::KMeansPP);
  CHECK(km.kmeans.k == 1);
  CHECK(km.kmeans.n_init == 10);
  CHECK(km.night_start_hour == 22);
  CHECK(km.night_end_hour == 5);
  auto fr = frozen_profile(Algorithm::Frequency);
  CHECK(fr.night_start_hour == 20);
  CHECK(fr.night_end_hour == 5);
  CHECK(frozen_profiles().size() == 6);
}

TEST_CASE("frozen evaluation is repeatable") {
  const auto& d = small_data();
  auto a = evaluate_frozen(d.users, d.truth, frozen_profiles());
  auto b = evaluate_frozen(d.users, d.truth, frozen_profiles(), kDefaultThresholds, 1);
  REQUIRE(a.size() == 6);
  for (const auto& [algo, rep] : a) {
    CHECK(rep.mae_m == b.at(algo).mae_m);
    CHECK(rep.n_evaluated == b.at(algo).n_evaluated);
  }
}
