#include "ghost/temporal.hpp"

namespace ghost {

bool in_window(int hour, const HourWindow& w) {
  if (w.full_day()) return true;
  if (w.wraps()) return hour >= w.start_hour || hour < w.end_hour;
  return hour >= w.start_hour && hour < w.end_hour;
}

HourWindow night_window(const DetectionParams& p) { return {p.night_start_hour, p.night_end_hour}; }
HourWindow weekend_window(const DetectionParams& p) { return {p.weekend_start_hour, p.weekend_end_hour}; }

std::vector<GpsPoint> filter_night(const UserTrajectory& t, const HourWindow& w) {
  std::vector<GpsPoint> out;
  for (const auto& p : t.points)
    if (in_window(p.time.hour(), w)) out.push_back(p);
  return out;
}

std::vector<GpsPoint> filter_weekend(const UserTrajectory& t, const HourWindow& w, const std::bitset<7>& days) {
  std::vector<GpsPoint> out;
  for (const auto& p : t.points)
    if (days.test(static_cast<std::size_t>(p.time.day_of_week())) && in_window(p.time.hour(), w)) out.push_back(p);
  return out;
}

}  // namespace ghost
