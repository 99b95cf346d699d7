#include "ghost/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "ghost/batch.hpp"
#include "ghost/rng.hpp"

namespace ghost {

// ---------------------------------------------------------------------------
// Grids

std::size_t AlgorithmGrid::combinations() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<std::pair<std::string, double>> AlgorithmGrid::combination(std::size_t i) const {
  std::vector<std::pair<std::string, double>> out(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& axis = axes[a];
    out[a] = {axis.key, axis.values[i % axis.values.size()]};
    i /= axis.values.size();
  }
  return out;
}

std::size_t ParamGrid::combinations() const {
  std::size_t n = 0;
  for (const auto& g : algorithms) n += g.combinations();
  return n;
}

ParamGrid ParamGrid::sensitivity_ranges() {
  const GridAxis starts{"night_start_hour", {20, 21, 22}};
  const GridAxis ends{"night_end_hour", {5, 6, 7}};
  const std::vector<double> spatial{20, 50, 150, 250};
  ParamGrid g;
  g.algorithms = {
      {Algorithm::Ghost, {{"grid_size", spatial}, starts, ends}},
      {Algorithm::A1, {{"a1.bandwidth_m", spatial}, starts, ends}},
      {Algorithm::A2,
       {{"a2.stay_dist_m", spatial}, {"a2.stay_time_min", {10, 25, 50}}, {"a2.region_radius_m", spatial}, starts, ends}},
      {Algorithm::Dbscan, {{"dbscan.eps_m", spatial}, {"dbscan.min_pts", {2, 4, 6}}, starts, ends}},
      {Algorithm::KMeansPP,
       {{"kmeans.k", {2, 4, 6}}, {"kmeans.random_state", {42, 100, 2048}}, {"kmeans.n_init", {20}}, starts, ends}},
      {Algorithm::Frequency, {starts, ends}},
  };
  return g;
}

const std::vector<std::string>& sweep_parameter_keys() {
  static const std::vector<std::string> keys{
      "grid_size",         "a1.bandwidth_m",      "a2.stay_dist_m", "a2.stay_time_min",
      "a2.region_radius_m", "dbscan.eps_m",       "dbscan.min_pts", "kmeans.k",
      "kmeans.random_state", "kmeans.n_init",     "night_start_hour", "night_end_hour",
      "weekend_start_hour", "weekend_end_hour"};
  return keys;
}

namespace {

int as_int(const std::string& key, double v) {
  if (!std::isfinite(v) || std::floor(v) != v || std::fabs(v) > 2e9)
    throw Error(ErrorKind::TypeMismatch, key + " expects an integer, got " + std::to_string(v));
  return static_cast<int>(v);
}

}  // namespace

void set_parameter(DetectionParams& p, const std::string& key, double v) {
  if (key == "grid_size") p.grid_size = v;
  else if (key == "night_start_hour") p.night_start_hour = as_int(key, v);
  else if (key == "night_end_hour") p.night_end_hour = as_int(key, v);
  else if (key == "weekend_start_hour") p.weekend_start_hour = as_int(key, v);
  else if (key == "weekend_end_hour") p.weekend_end_hour = as_int(key, v);
  else if (key == "a1.bandwidth_m") p.a1.bandwidth_m = v;
  else if (key == "a2.stay_dist_m") p.a2.stay_dist_m = v;
  else if (key == "a2.stay_time_min") p.a2.stay_time_min = v;
  else if (key == "a2.region_radius_m") p.a2.region_radius_m = v;
  else if (key == "dbscan.eps_m") p.dbscan.eps_m = v;
  else if (key == "dbscan.min_pts") p.dbscan.min_pts = as_int(key, v);
  else if (key == "kmeans.k") p.kmeans.k = as_int(key, v);
  else if (key == "kmeans.random_state") {
    if (!(v >= 0) || std::floor(v) != v) throw Error(ErrorKind::TypeMismatch, key + " expects a non-negative integer");
    p.kmeans.random_state = static_cast<std::uint64_t>(v);
  } else if (key == "kmeans.n_init") p.kmeans.n_init = as_int(key, v);
  else throw Error(ErrorKind::UnknownKey, "unknown parameter '" + key + "'");
}

double get_parameter(const DetectionParams& p, const std::string& key) {
  if (key == "grid_size") return p.grid_size;
  if (key == "night_start_hour") return p.night_start_hour;
  if (key == "night_end_hour") return p.night_end_hour;
  if (key == "weekend_start_hour") return p.weekend_start_hour;
  if (key == "weekend_end_hour") return p.weekend_end_hour;
  if (key == "a1.bandwidth_m") return p.a1.bandwidth_m;
  if (key == "a2.stay_dist_m") return p.a2.stay_dist_m;
  if (key == "a2.stay_time_min") return p.a2.stay_time_min;
  if (key == "a2.region_radius_m") return p.a2.region_radius_m;
  if (key == "dbscan.eps_m") return p.dbscan.eps_m;
  if (key == "dbscan.min_pts") return p.dbscan.min_pts;
  if (key == "kmeans.k") return p.kmeans.k;
  if (key == "kmeans.random_state") return static_cast<double>(p.kmeans.random_state);
  if (key == "kmeans.n_init") return p.kmeans.n_init;
  throw Error(ErrorKind::UnknownKey, "unknown parameter '" + key + "'");
}

// ---------------------------------------------------------------------------
// Split

UserSplit split_users(std::vector<std::string> ids, double train_fraction, std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::size_t n = ids.size();
  if (n < 2) throw Error(ErrorKind::TooFewUsers, "need at least two users to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::TooFewUsers, "train fraction must leave both sides non-empty");

  SplitMix64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(ids[i], ids[j]);
  }
  // Guard against 0.8 * 10 landing a hair above 8 in binary.
  const auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
  if (n_train == 0 || n_train >= n) throw Error(ErrorKind::TooFewUsers, "split leaves one side empty");

  UserSplit s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  return s;
}

std::vector<UserTrajectory> select_users(std::span<const UserTrajectory> users, std::span<const std::string> ids) {
  const std::set<std::string> wanted(ids.begin(), ids.end());
  std::vector<UserTrajectory> out;
  for (const auto& u : users)
    if (wanted.count(u.user_id)) out.push_back(u);
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct Task {
  Algorithm algorithm;
  std::vector<std::pair<std::string, double>> params;
  DetectionParams resolved;
};

std::vector<Task> expand(const ParamGrid& grid, const DetectionParams& base) {
  std::vector<Task> tasks;
  for (const auto& g : grid.algorithms) {
    for (std::size_t i = 0; i < g.combinations(); ++i) {
      Task t{g.algorithm, g.combination(i), base};
      for (const auto& [k, v] : t.params) set_parameter(t.resolved, k, v);
      t.resolved.validate();
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

SweepRow score_row(const Task& t, std::span<const HomeEstimate> estimates, const GroundTruth& truth) {
  SweepRow row{t.algorithm, t.params, t.resolved, 0.0, 0.0, 0, 0};
  try {
    const auto report = score(estimates, truth);
    row.train_mae_m = report.mae_m;
    row.train_rmse_m = report.rmse_m;
    row.n_evaluated = report.n_evaluated;
    row.n_missing = report.n_missing;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoEvaluableUsers) throw;
    row.train_mae_m = row.train_rmse_m = std::numeric_limits<double>::quiet_NaN();
    row.n_missing = estimates.size();
  }
  return row;
}

std::vector<double> param_values(const SweepRow& r) {
  std::vector<double> v;
  for (const auto& [k, x] : r.params) v.push_back(x);
  return v;
}

SweepResult finish(std::vector<SweepRow> rows) {
  SweepResult out{std::move(rows), {}};
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& r = out.rows[i];
    if (r.n_evaluated == 0) continue;
    auto it = out.best_row.find(r.algorithm);
    if (it == out.best_row.end()) {
      out.best_row.emplace(r.algorithm, i);
      continue;
    }
    const auto& b = out.rows[it->second];
    if (r.train_mae_m < b.train_mae_m || (r.train_mae_m == b.train_mae_m && param_values(r) < param_values(b)))
      it->second = i;
  }
  return out;
}

HomeEstimate detect_or_none(Algorithm a, const UserTrajectory& u, const DetectionParams& p) {
  try {
    return detect(a, u, p);
  } catch (const Error&) {
    return HomeEstimate::undetected(u.user_id, a);
  }
}

}  // namespace

SweepResult run_sweep_serial(std::span<const UserTrajectory> users, const GroundTruth& truth, const ParamGrid& grid,
                             const DetectionParams& base) {
  const auto tasks = expand(grid, base);
  std::vector<SweepRow> rows;
  rows.reserve(tasks.size());
  for (const auto& t : tasks) {
    std::vector<HomeEstimate> est;
    est.reserve(users.size());
    for (const auto& u : users) est.push_back(detect_or_none(t.algorithm, u, t.resolved));
    rows.push_back(score_row(t, est, truth));
  }
  return finish(std::move(rows));
}

SweepResult run_sweep(std::span<const UserTrajectory> users, const GroundTruth& truth, const ParamGrid& grid,
                      const DetectionParams& base, int threads) {
  if (threads <= 0) threads = default_thread_count();
  const auto tasks = expand(grid, base);
  const std::size_t nu = users.size();
  std::vector<HomeEstimate> est(tasks.size() * nu);

  const auto total = static_cast<std::ptrdiff_t>(est.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const auto& t = tasks[idx / nu];
    est[idx] = detect_or_none(t.algorithm, users[idx % nu], t.resolved);
  }

  std::vector<SweepRow> rows;
  rows.reserve(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t)
    rows.push_back(score_row(tasks[t], std::span(est).subspan(t * nu, nu), truth));
  return finish(std::move(rows));
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  const auto& keys = sweep_parameter_keys();
  out << "algorithm";
  for (const auto& k : keys) out << ',' << k;
  out << ",train_mae_m,train_rmse_m,n_evaluated\n";
  char buf[64];
  for (const auto& r : result.rows) {
    out << to_string(r.algorithm);
    for (const auto& k : keys) {
      out << ',';
      for (const auto& [pk, v] : r.params)
        if (pk == k) {
          std::snprintf(buf, sizeof buf, "%.17g", v);
          out << buf;
        }
    }
    if (r.n_evaluated == 0) {
      out << ",,," << r.n_evaluated << '\n';
    } else {
      std::snprintf(buf, sizeof buf, ",%.3f,%.3f,", r.train_mae_m, r.train_rmse_m);
      out << buf << r.n_evaluated << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Frozen profiles

DetectionParams frozen_profile(Algorithm algo) {
  DetectionParams p;
  switch (algo) {
    case Algorithm::Ghost:
      p.grid_size = 50;
      p.night_start_hour = 22;
      p.night_end_hour = 6;
      break;
    case Algorithm::A1:
      p.a1.bandwidth_m = 20;
      p.night_start_hour = 22;
      p.night_end_hour = 5;
      break;
    case Algorithm::A2:
      p.a2 = {50, 10, 50};
      p.night_start_hour = 20;
      p.night_end_hour = 5;
      break;
    case Algorithm::Dbscan:
      p.dbscan = {20, 4};
      p.night_start_hour = 21;
      p.night_end_hour = 5;
      break;
    case Algorithm::KMeansPP:
      p.kmeans.k = 1;
      p.kmeans.n_init = 10;
      p.night_start_hour = 22;
      p.night_end_hour = 5;
      break;
    case Algorithm::Frequency:
      p.night_start_hour = 20;
      p.night_end_hour = 5;
      break;
  }
  return p;
}

std::map<Algorithm, DetectionParams> frozen_profiles() {
  std::map<Algorithm, DetectionParams> out;
  for (auto a : kAllAlgorithms) out.emplace(a, frozen_profile(a));
  return out;
}

std::map<Algorithm, ValidationReport> evaluate_frozen(std::span<const UserTrajectory> users, const GroundTruth& truth,
                                                      const std::map<Algorithm, DetectionParams>& frozen,
                                                      std::span<const double> thresholds, int threads) {
  std::map<Algorithm, ValidationReport> out;
  for (const auto& [algo, params] : frozen) {
    const auto batch = detect_batch_parallel(users, algo, params, threads);
    out.emplace(algo, score(batch.estimates, truth, thresholds));
  }
  return out;
}

}  // namespace ghost
