/**
 * @file batch.hpp
 * @brief Per-user detection across many trajectories.
 *
 * detect_batch_serial is the reference; detect_batch_parallel spreads users over
 * OpenMP threads and writes each result into its own slot, so the output is
 * identical to the serial version for any thread count.
 */
#pragma once

#include <span>
#include <string>
#include <vector>

#include "ghost/core.hpp"

namespace ghost {

struct UserFailure {
  std::string user_id;
  std::string message;
};

struct BatchResult {
  std::vector<HomeEstimate> estimates;  ///< same order as the input trajectories
  std::vector<UserFailure> failures;    ///< users whose detector raised; their estimate is "none"
};

/// Dispatches to the detector for `algo`. Throws whatever the detector throws.
HomeEstimate detect(Algorithm algo, const UserTrajectory& t, const DetectionParams& p);

BatchResult detect_batch_serial(std::span<const UserTrajectory> users, Algorithm algo, const DetectionParams& p);
/// threads <= 0 uses the OpenMP default.
BatchResult detect_batch_parallel(std::span<const UserTrajectory> users, Algorithm algo, const DetectionParams& p,
                                  int threads = 0);

/// Thread count the parallel kernels use when not told otherwise.
int default_thread_count();
void set_default_thread_count(int threads);

}  // namespace ghost
