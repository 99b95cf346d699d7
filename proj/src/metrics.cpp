#include "ghost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "ghost/ingest.hpp"

namespace ghost {

double mean_error(std::span<const double> errors) {
  if (errors.empty()) return 0.0;
  double s = 0.0;
  for (double e : errors) s += e;
  return s / static_cast<double>(errors.size());
}

double rms_error(std::span<const double> errors) {
  if (errors.empty()) return 0.0;
  double s = 0.0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

double median_error(std::vector<double> errors) {
  if (errors.empty()) return 0.0;
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  return n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
}

ValidationReport score(std::span<const HomeEstimate> estimates, const GroundTruth& truth,
                       std::span<const double> thresholds) {
  for (double t : thresholds)
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "thresholds must be positive");

  ValidationReport r;
  for (const auto& e : estimates) {
    auto it = truth.find(e.user_id);
    if (!e.detected() || !e.home_lat || !e.home_lon || it == truth.end()) {
      r.missing_users.push_back(e.user_id);
      continue;
    }
    ValidationRecord rec;
    rec.user_id = e.user_id;
    rec.predicted_lat = *e.home_lat;
    rec.predicted_lon = *e.home_lon;
    rec.true_lat = it->second.lat;
    rec.true_lon = it->second.lon;
    rec.error_m = haversine_m(rec.predicted_lat, rec.predicted_lon, rec.true_lat, rec.true_lon);
    r.records.push_back(std::move(rec));
  }
  std::sort(r.records.begin(), r.records.end(), [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  std::sort(r.missing_users.begin(), r.missing_users.end());
  r.n_evaluated = r.records.size();
  r.n_missing = r.missing_users.size();
  if (r.n_evaluated == 0) throw Error(ErrorKind::NoEvaluableUsers, "no user has both an estimate and ground truth");

  std::vector<double> errors;
  errors.reserve(r.records.size());
  for (const auto& rec : r.records) errors.push_back(rec.error_m);
  r.mae_m = mean_error(errors);
  r.rmse_m = rms_error(errors);
  r.median_m = median_error(errors);
  for (double t : thresholds) {
    const auto hits = std::count_if(errors.begin(), errors.end(), [t](double e) { return e <= t; });
    r.hit_rates[t] = static_cast<double>(hits) / static_cast<double>(errors.size());
  }
  return r;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorKind::FileNotFound, "ground truth not found: " + path.string());
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MissingHeader, "empty ground truth file");
  const auto header = split_csv_line(line);
  auto col = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorKind::MissingHeader, "ground truth lacks column " + std::string(name));
  };
  const auto cu = col("user_id"), cl = col("latitude"), co = col("longitude");

  GroundTruth truth;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() <= std::max({cu, cl, co}))
      throw Error(ErrorKind::MissingField, "ground truth row " + std::to_string(row) + " is short");
    const auto lat = parse_double(f[cl]);
    const auto lon = parse_double(f[co]);
    if (!lat || !lon || !valid_latitude(*lat) || !valid_longitude(*lon))
      throw Error(ErrorKind::CoordinateOutOfRange, "ground truth row " + std::to_string(row) + " out of range");
    if (!truth.emplace(f[cu], LatLon{*lat, *lon}).second)
      throw Error(ErrorKind::DuplicateUser, "duplicate ground truth user " + f[cu]);
  }
  return truth;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  out << "user_id,latitude,longitude\n";
  char buf[64];
  for (const auto& [user, ll] : truth) {
    std::snprintf(buf, sizeof buf, "%.7f,%.7f", ll.lat, ll.lon);
    out << user << ',' << buf << '\n';
  }
}

void write_report_csv(const std::filesystem::path& path, const ValidationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
  out << "user_id,predicted_lat,predicted_lon,true_lat,true_lon,error_m\n";
  char buf[128];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, "%.7f,%.7f,%.7f,%.7f,%.3f", r.predicted_lat, r.predicted_lon, r.true_lat,
                  r.true_lon, r.error_m);
    out << r.user_id << ',' << buf << '\n';
  }
}

std::string report_summary_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["n_evaluated"] = report.n_evaluated;
  j["n_missing"] = report.n_missing;
  j["mae_m"] = report.mae_m;
  j["rmse_m"] = report.rmse_m;
  j["median_m"] = report.median_m;
  auto& hits = j["hit_rates"] = nlohmann::ordered_json::object();
  for (const auto& [t, rate] : report.hit_rates) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", t);
    hits[key] = rate;
  }
  j["missing_users"] = report.missing_users;
  return j.dump(2) + "\n";
}

}  // namespace ghost
