#include <doctest.h>

#include "ghost/temporal.hpp"

using namespace ghost;

namespace {

// Reference membership: walk forward from start until end, one hour at a time.
bool covered(int h, int start, int end) {
  if (start == end) return true;
  for (int x = start; x != end; x = (x + 1) % 24)
    if (x == h) return true;
  return false;
}

GpsPoint at(int day, int hour) { return {"u", Timestamp::from_civil(2025, 6, day, hour, 30), 0, 0}; }

}  // namespace

TEST_CASE("hour windows match exhaustive enumeration") {
  for (int s = 0; s < 24; ++s)
    for (int e = 0; e < 24; ++e)
      for (int h = 0; h < 24; ++h) CHECK(in_window(h, {s, e}) == covered(h, s, e));
}

TEST_CASE("default night window is 22:00 to 05:59") {
  const HourWindow w{22, 6};
  CHECK(w.wraps());
  CHECK(in_window(22, w));
  CHECK(in_window(0, w));
  CHECK(in_window(5, w));
  CHECK_FALSE(in_window(6, w));
  CHECK_FALSE(in_window(21, w));
  // A window and its complement partition the day.
  for (int h = 0; h < 24; ++h) CHECK(in_window(h, w) != in_window(h, w.complement()));
}

TEST_CASE("filters select by hour and weekday") {
  // 2025-06-02 is a Monday; 06-07 Saturday; 06-08 Sunday.
  UserTrajectory t{"u", {at(2, 23), at(3, 3), at(4, 12), at(7, 12), at(8, 7), at(8, 19), at(8, 20)}};
  DetectionParams p;
  auto night = filter_night(t, night_window(p));
  CHECK(night.size() == 2);
  auto wk = filter_weekend(t, weekend_window(p), p.weekend_days);
  REQUIRE(wk.size() == 2);
  CHECK(wk[0].time.hour() == 12);
  CHECK(wk[1].time.hour() == 19);
  std::bitset<7> monday_only{0b0000001};
  CHECK(filter_weekend(t, {0, 0}, monday_only).size() == 1);
}
