#include "ghost/core.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace ghost {

namespace {

constexpr std::int64_t kUsPerSecond = 1'000'000;
constexpr std::int64_t kUsPerDay = 86'400 * kUsPerSecond;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  bool digits(std::size_t count, int& out) {
    if (pos_ + count > s_.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      char c = s_[pos_ + i];
      if (c < '0' || c > '9') return false;
      value = value * 10 + (c - '0');
    }
    pos_ += count;
    out = value;
    return true;
  }
  bool literal(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::optional<char> peek() const {
    if (pos_ < s_.size()) return s_[pos_];
    return std::nullopt;
  }
  bool done() const { return pos_ == s_.size(); }
  void advance() { ++pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorKind::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MissingHeader: return "MissingHeader";
    case ErrorKind::NoValidRecords: return "NoValidRecords";
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::NotADirectory: return "NotADirectory";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonPositiveGridSize: return "NonPositiveGridSize";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::KExceedsPoints: return "KExceedsPoints";
    case ErrorKind::NoEvaluableUsers: return "NoEvaluableUsers";
    case ErrorKind::DuplicateUser: return "DuplicateUser";
    case ErrorKind::TooFewUsers: return "TooFewUsers";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::MalformedResults: return "MalformedResults";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Timestamp

std::int64_t Timestamp::local_day() const { return floor_div(wall_us, kUsPerDay); }

int Timestamp::hour() const {
  std::int64_t of_day = wall_us - local_day() * kUsPerDay;
  return static_cast<int>(of_day / (3600 * kUsPerSecond));
}

int Timestamp::day_of_week() const {
  using namespace std::chrono;
  sys_days day{days{local_day()}};
  return static_cast<int>(weekday{day}.iso_encoding()) - 1;
}

Timestamp Timestamp::from_civil(int year, unsigned month, unsigned day, int hour, int minute,
                                double second) {
  using namespace std::chrono;
  sys_days d{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  Timestamp t;
  t.wall_us = static_cast<std::int64_t>(d.time_since_epoch().count()) * kUsPerDay +
              (std::int64_t{hour} * 3600 + std::int64_t{minute} * 60) * kUsPerSecond +
              std::llround(second * 1e6);
  return t;
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  using namespace std::chrono;
  Scanner sc(trim(text));
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!sc.digits(4, y) || !sc.literal('-') || !sc.digits(2, mo) || !sc.literal('-') || !sc.digits(2, d))
    return std::nullopt;
  if (!sc.literal('T') && !sc.literal('t') && !sc.literal(' ')) return std::nullopt;
  if (!sc.digits(2, h) || !sc.literal(':') || !sc.digits(2, mi) || !sc.literal(':') || !sc.digits(2, s))
    return std::nullopt;

  std::int64_t frac_us = 0;
  if (sc.literal('.')) {
    int scale = 100'000;
    bool any = false;
    while (auto c = sc.peek()) {
      if (*c < '0' || *c > '9') break;
      if (scale > 0) {
        frac_us += (*c - '0') * scale;
        scale /= 10;
      }
      any = true;
      sc.advance();
    }
    if (!any) return std::nullopt;
  }

  Timestamp t;
  if (sc.literal('Z') || sc.literal('z')) {
    t.has_offset = true;
  } else if (auto c = sc.peek(); c && (*c == '+' || *c == '-')) {
    sc.advance();
    int oh = 0, om = 0;
    if (!sc.digits(2, oh) || !sc.literal(':') || !sc.digits(2, om)) return std::nullopt;
    if (oh > 23 || om > 59) return std::nullopt;
    t.has_offset = true;
    t.offset_s = (*c == '-' ? -1 : 1) * (oh * 3600 + om * 60);
  }
  if (!sc.done()) return std::nullopt;

  year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                     std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;

  sys_days day_point{ymd};
  t.wall_us = static_cast<std::int64_t>(day_point.time_since_epoch().count()) * kUsPerDay +
              (std::int64_t{h} * 3600 + std::int64_t{mi} * 60 + s) * kUsPerSecond + frac_us;
  return t;
}

std::string Timestamp::to_string() const {
  using namespace std::chrono;
  std::int64_t day = local_day();
  std::int64_t of_day = wall_us - day * kUsPerDay;
  year_month_day ymd{sys_days{days{day}}};
  auto secs = of_day / kUsPerSecond;
  auto frac = of_day % kUsPerSecond;

  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                        static_cast<long long>(secs % 60));
  std::string out(buf, static_cast<std::size_t>(n));
  if (frac != 0) {
    std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(frac));
    out += buf;
  }
  if (has_offset) {
    if (offset_s == 0) {
      out += 'Z';
    } else {
      int a = offset_s < 0 ? -offset_s : offset_s;
      std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_s < 0 ? '-' : '+', a / 3600, a / 60 % 60);
      out += buf;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void UserTrajectory::sort() {
  std::stable_sort(points.begin(), points.end(), [](const GpsPoint& a, const GpsPoint& b) {
    return a.time.instant_us() < b.time.instant_us();
  });
}

std::string_view to_string(InferenceSource s) {
  switch (s) {
    case InferenceSource::Night: return "night";
    case InferenceSource::Weekend: return "weekend";
    case InferenceSource::None: return "none";
  }
  return "none";
}

std::string_view to_string(RefinementMethod m) {
  switch (m) {
    case RefinementMethod::DensestBinCentroid: return "densest_bin_centroid";
    case RefinementMethod::MeanCellPoints: return "mean_cell_points";
    case RefinementMethod::GridCentroid: return "grid_centroid";
    case RefinementMethod::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ghost: return "ghost";
    case Algorithm::A1: return "a1";
    case Algorithm::A2: return "a2";
    case Algorithm::Dbscan: return "dbscan";
    case Algorithm::KMeansPP: return "kmeanspp";
    case Algorithm::Frequency: return "frequency";
  }
  return "ghost";
}

std::optional<InferenceSource> parse_inference_source(std::string_view s) {
  for (auto v : {InferenceSource::Night, InferenceSource::Weekend, InferenceSource::None})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<RefinementMethod> parse_refinement_method(std::string_view s) {
  for (auto v : {RefinementMethod::DensestBinCentroid, RefinementMethod::MeanCellPoints,
                 RefinementMethod::GridCentroid, RefinementMethod::NotApplicable})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto v : kAllAlgorithms)
    if (to_string(v) == s) return v;
  return std::nullopt;
}

HomeEstimate HomeEstimate::undetected(std::string user_id, Algorithm algorithm) {
  HomeEstimate e;
  e.user_id = std::move(user_id);
  e.algorithm = algorithm;
  return e;
}

void DetectionParams::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidParameter, field + ": " + why);
  };
  auto hour_ok = [](int h) { return h >= 0 && h <= 23; };
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };

  if (!positive(grid_size)) fail("grid_size", "must be > 0");
  if (!hour_ok(night_start_hour)) fail("night_start_hour", "must be in [0, 23]");
  if (!hour_ok(night_end_hour)) fail("night_end_hour", "must be in [0, 23]");
  if (!hour_ok(weekend_start_hour)) fail("weekend_start_hour", "must be in [0, 23]");
  if (!hour_ok(weekend_end_hour)) fail("weekend_end_hour", "must be in [0, 23]");
  if (!positive(a1.bandwidth_m)) fail("a1.bandwidth_m", "must be > 0");
  if (!positive(a2.stay_dist_m)) fail("a2.stay_dist_m", "must be > 0");
  if (!positive(a2.stay_time_min)) fail("a2.stay_time_min", "must be > 0");
  if (!positive(a2.region_radius_m)) fail("a2.region_radius_m", "must be > 0");
  if (!positive(dbscan.eps_m)) fail("dbscan.eps_m", "must be > 0");
  if (dbscan.min_pts < 1) fail("dbscan.min_pts", "must be >= 1");
  if (kmeans.k < 1) fail("kmeans.k", "must be >= 1");
  if (kmeans.n_init < 1) fail("kmeans.n_init", "must be >= 1");
}

bool valid_latitude(double lat) { return std::isfinite(lat) && lat >= -90.0 && lat <= 90.0; }
bool valid_longitude(double lon) { return std::isfinite(lon) && lon >= -180.0 && lon <= 180.0; }

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::variant<GpsPoint, Rejection> validate_point(const RawRecord& raw) {
  auto missing = [](const std::optional<std::string>& f) { return !f || trim(*f).empty(); };
  if (missing(raw.user_id)) return Rejection{ErrorKind::MissingField, "user_id"};
  if (missing(raw.timestamp)) return Rejection{ErrorKind::MissingField, "timestamp"};
  if (missing(raw.lat)) return Rejection{ErrorKind::MissingField, "latitude"};
  if (missing(raw.lon)) return Rejection{ErrorKind::MissingField, "longitude"};

  auto time = Timestamp::parse(*raw.timestamp);
  if (!time) return Rejection{ErrorKind::UnparseableTimestamp, "timestamp"};

  // Non-numeric coordinates count as out of range: NaN is not within the bounds.
  auto lat = parse_double(*raw.lat);
  if (!lat || !valid_latitude(*lat)) return Rejection{ErrorKind::CoordinateOutOfRange, "latitude"};
  auto lon = parse_double(*raw.lon);
  if (!lon || !valid_longitude(*lon)) return Rejection{ErrorKind::CoordinateOutOfRange, "longitude"};

  return GpsPoint{std::string(trim(*raw.user_id)), *time, *lat, *lon};
}

}  // namespace ghost
