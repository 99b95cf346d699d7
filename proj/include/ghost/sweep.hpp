/**
 * @file sweep.hpp
 * @brief Sensitivity protocol: seeded user split, Cartesian parameter sweeps on
 *        the training users, and frozen-profile evaluation on held-out users.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/metrics.hpp"

namespace ghost {

/// One sweep dimension: a parameter key (config spelling, e.g. "a2.stay_dist_m") and its values.
struct GridAxis {
  std::string key;
  std::vector<double> values;
};

struct AlgorithmGrid {
  Algorithm algorithm = Algorithm::Ghost;
  std::vector<GridAxis> axes;

  std::size_t combinations() const;
  /// i-th combination in row-major order (last axis fastest).
  std::vector<std::pair<std::string, double>> combination(std::size_t i) const;
};

struct ParamGrid {
  std::vector<AlgorithmGrid> algorithms;

  std::size_t combinations() const;
  /// The published sensitivity ranges for all six detectors.
  static ParamGrid sensitivity_ranges();
};

/// Every key a sweep may vary, in CSV column order.
const std::vector<std::string>& sweep_parameter_keys();

/// Sets one tunable by config key. Throws Error(UnknownKey) / Error(InvalidParameter).
void set_parameter(DetectionParams& p, const std::string& key, double value);
double get_parameter(const DetectionParams& p, const std::string& key);

struct SweepRow {
  Algorithm algorithm = Algorithm::Ghost;
  std::vector<std::pair<std::string, double>> params;
  DetectionParams resolved;
  double train_mae_m = 0.0;
  double train_rmse_m = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_missing = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::map<Algorithm, std::size_t> best_row;  ///< index into rows; absent if nothing was evaluable
};

struct UserSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Sorted ids, Fisher-Yates shuffle over SplitMix64(seed), first ceil(f * n) train.
/// Throws Error(TooFewUsers) unless both sides end up non-empty.
UserSplit split_users(std::vector<std::string> user_ids, double train_fraction, std::uint64_t seed);

/// Scores every combination on the given users. `base` supplies parameters the
/// grid does not vary. threads <= 0 uses the OpenMP default.
SweepResult run_sweep(std::span<const UserTrajectory> users, const GroundTruth& truth, const ParamGrid& grid,
                      const DetectionParams& base = {}, int threads = 0);
/// Reference implementation: same output, one thread, no task flattening.
SweepResult run_sweep_serial(std::span<const UserTrajectory> users, const GroundTruth& truth, const ParamGrid& grid,
                             const DetectionParams& base = {});

/// Frozen per-algorithm parameters selected on training data.
DetectionParams frozen_profile(Algorithm algo);
std::map<Algorithm, DetectionParams> frozen_profiles();

std::map<Algorithm, ValidationReport> evaluate_frozen(std::span<const UserTrajectory> users, const GroundTruth& truth,
                                                      const std::map<Algorithm, DetectionParams>& frozen,
                                                      std::span<const double> thresholds = kDefaultThresholds,
                                                      int threads = 0);

std::vector<UserTrajectory> select_users(std::span<const UserTrajectory> users, std::span<const std::string> ids);

std::string sweep_csv(const SweepResult& result);

}  // namespace ghost
