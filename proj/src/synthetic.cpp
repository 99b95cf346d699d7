#include "ghost/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ghost/geo.hpp"
#include "ghost/rng.hpp"

namespace ghost {

namespace {

constexpr double kBoxLatMin = 42.25;
constexpr double kBoxLatMax = 42.45;
constexpr double kBoxLonMin = -71.20;
constexpr double kBoxLonMax = -70.95;

std::string user_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "user_%03d", i);
  return buf;
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorKind::InvalidParameter, what); };
  if (n_users < 0) fail("n_users must be >= 0");
  if (days < 0) fail("days must be >= 0");
  if (!(sigma_m >= 0.0)) fail("sigma must be >= 0");
  if (!(work_offset_m >= 0.0)) fail("work offset must be >= 0");
  if (!(night_rate >= 0.0) || !(day_rate >= 0.0)) fail("ping rates must be >= 0");
  if (!(dropout >= 0.0 && dropout <= 1.0)) fail("dropout must be in [0, 1]");
  if (night.start_hour < 0 || night.start_hour > 23 || night.end_hour < 0 || night.end_hour > 23)
    fail("night window hours must be in [0, 23]");
}

SynthDataset generate(const SynthSpec& spec) {
  spec.validate();
  SynthDataset out;
  const Timestamp start = Timestamp::from_civil(spec.start_year, spec.start_month, spec.start_day, 0, 0);

  for (int u = 0; u < spec.n_users; ++u) {
    SplitMix64 rng(spec.seed ^ static_cast<std::uint64_t>(u));
    const std::string id = user_name(u);

    const double home_lat = kBoxLatMin + rng.uniform() * (kBoxLatMax - kBoxLatMin);
    const double home_lon = kBoxLonMin + rng.uniform() * (kBoxLonMax - kBoxLonMin);
    const double bearing = 2.0 * std::numbers::pi * rng.uniform();
    const LocalProjection frame(home_lat, home_lon);
    const Vec2 work{spec.work_offset_m * std::cos(bearing), spec.work_offset_m * std::sin(bearing)};
    out.truth[id] = {home_lat, home_lon};

    UserTrajectory t{id, {}};
    for (int d = 0; d < spec.days; ++d) {
      for (int h = 0; h < 24; ++h) {
        Timestamp hour_start = start;
        hour_start.wall_us += (std::int64_t{d} * 24 + h) * 3600LL * 1'000'000;
        const bool night = in_window(h, spec.night);
        const bool weekend = hour_start.day_of_week() >= 5;
        const Vec2 anchor = (night || (weekend && spec.weekend_at_home)) ? Vec2{} : work;

        const double rate = night ? spec.night_rate : spec.day_rate;
        auto pings = static_cast<int>(std::floor(rate));
        if (rng.uniform() < rate - std::floor(rate)) ++pings;

        for (int k = 0; k < pings; ++k) {
          const double offset_s = std::floor(rng.uniform() * 3600.0);
          const double dx = rng.normal() * spec.sigma_m;
          const double dy = rng.normal() * spec.sigma_m;
          const bool dropped = rng.uniform() < spec.dropout;
          ++out.pings_scheduled;
          if (dropped) continue;

          GpsPoint p;
          p.user_id = id;
          p.time = hour_start;
          p.time.wall_us += static_cast<std::int64_t>(offset_s) * 1'000'000;
          const LatLon ll = frame.inverse(anchor.x + dx, anchor.y + dy);
          p.lat = ll.lat;
          p.lon = ll.lon;
          t.points.push_back(std::move(p));
          ++out.pings_kept;
        }
      }
    }
    t.sort();
    out.users.push_back(std::move(t));
  }
  return out;
}

}  // namespace ghost
