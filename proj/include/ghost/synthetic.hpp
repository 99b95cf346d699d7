/**
 * @file synthetic.hpp
 * @brief Seeded generator of trajectories with planted home locations.
 *
 * Each user gets a home inside a metro-sized box and a workplace a fixed
 * distance away on a random bearing. Night-window hours ping at home; weekday
 * daytime hours ping at work; weekend daytime hours ping at home. Every ping
 * carries isotropic Gaussian jitter and is independently dropped.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/metrics.hpp"
#include "ghost/temporal.hpp"

namespace ghost {

struct SynthSpec {
  int n_users = 50;
  int days = 14;
  double sigma_m = 10.0;
  double work_offset_m = 2000.0;
  double night_rate = 4.0;  ///< pings per night-window hour
  double day_rate = 6.0;    ///< pings per daytime hour
  double dropout = 0.52;
  std::uint64_t seed = 7;
  HourWindow night{22, 6};
  bool weekend_at_home = true;
  int start_year = 2025;  ///< first simulated day; 2025-06-02 is a Monday
  unsigned start_month = 6;
  unsigned start_day = 2;

  /// Throws Error(InvalidParameter).
  void validate() const;
};

struct SynthDataset {
  std::vector<UserTrajectory> users;  ///< ordered by user_id
  GroundTruth truth;
  std::size_t pings_scheduled = 0;    ///< before dropout
  std::size_t pings_kept = 0;
};

SynthDataset generate(const SynthSpec& spec);

}  // namespace ghost
