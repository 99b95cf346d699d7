/**
 * @file temporal.hpp
 * @brief Wall-clock hour windows and the night / weekend-daytime filters.
 *
 * Windows are half-open over whole hours: [start, end). A window whose start is
 * after its end wraps midnight (22 -> 6 covers 22:00-05:59). start == end means
 * "all 24 hours". Minutes are ignored; only the hour field is tested.
 */
#pragma once

#include <bitset>
#include <vector>

#include "ghost/core.hpp"

namespace ghost {

struct HourWindow {
  int start_hour = 22;
  int end_hour = 6;

  bool wraps() const { return start_hour > end_hour; }
  bool full_day() const { return start_hour == end_hour; }
  HourWindow complement() const { return {end_hour, start_hour}; }
};

bool in_window(int hour, const HourWindow& w);

HourWindow night_window(const DetectionParams& p);
HourWindow weekend_window(const DetectionParams& p);

std::vector<GpsPoint> filter_night(const UserTrajectory& t, const HourWindow& w);
std::vector<GpsPoint> filter_weekend(const UserTrajectory& t, const HourWindow& w, const std::bitset<7>& days);

}  // namespace ghost
