/**
 * @file metrics.hpp
 * @brief Accuracy of home estimates against ground truth (haversine MAE / RMSE).
 */
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/geo.hpp"

namespace ghost {

using GroundTruth = std::map<std::string, LatLon>;

inline const std::vector<double> kDefaultThresholds{50.0, 100.0, 250.0};

struct ValidationReport {
  std::vector<ValidationRecord> records;  ///< evaluated users, sorted by user_id
  double mae_m = 0.0;
  double rmse_m = 0.0;
  double median_m = 0.0;
  std::map<double, double> hit_rates;  ///< threshold (m) -> fraction of evaluated users within it
  std::size_t n_evaluated = 0;
  std::size_t n_missing = 0;
  std::vector<std::string> missing_users;
};

double mean_error(std::span<const double> errors);
double rms_error(std::span<const double> errors);
double median_error(std::vector<double> errors);

/// Users without an estimate or without truth count as missing, not as errors.
/// Throws Error(NoEvaluableUsers) if nobody can be scored.
ValidationReport score(std::span<const HomeEstimate> estimates, const GroundTruth& truth,
                       std::span<const double> thresholds = kDefaultThresholds);

/// CSV with header user_id,latitude,longitude.
GroundTruth load_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

void write_report_csv(const std::filesystem::path& path, const ValidationReport& report);
std::string report_summary_json(const ValidationReport& report);

}  // namespace ghost
