/**
 * @file core.hpp
 * @brief Shared domain types: points, trajectories, cell statistics, estimates
 *        and detection parameters, plus record-level validation.
 */
#pragma once

#include <bitset>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ghost {

enum class ErrorKind : std::uint8_t {
  MissingField,
  UnparseableTimestamp,
  CoordinateOutOfRange,
  FileNotFound,
  MissingHeader,
  NoValidRecords,
  MalformedXml,
  NotADirectory,
  EmptyInput,
  NonPositiveGridSize,
  EmptyCell,
  KExceedsPoints,
  NoEvaluableUsers,
  DuplicateUser,
  TooFewUsers,
  UnknownKey,
  TypeMismatch,
  MalformedResults,
  InvalidParameter,
};

std::string_view to_string(ErrorKind kind);

/// Error carrying a machine-readable kind. Thrown for whole-operation failures;
/// per-record problems are reported as Rejection values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/**
 * @brief Wall-clock timestamp with an optional declared UTC offset.
 *
 * Hour-of-day, day-of-week and calendar date come from the wall clock as
 * written in the input. Durations and ordering use the absolute instant
 * (wall clock minus offset; naive timestamps are treated as offset 0).
 */
struct Timestamp {
  std::int64_t wall_us = 0;  ///< microseconds since 1970-01-01T00:00:00 on the wall clock
  std::int32_t offset_s = 0;
  bool has_offset = false;

  std::int64_t instant_us() const { return wall_us - std::int64_t{offset_s} * 1'000'000; }
  double instant_seconds() const { return static_cast<double>(instant_us()) * 1e-6; }

  /// Days since 1970-01-01 of the wall-clock date.
  std::int64_t local_day() const;
  int hour() const;
  /// Monday = 0 ... Sunday = 6.
  int day_of_week() const;

  /// Accepts RFC 3339 ("2025-06-19T23:00:00Z", fractional seconds, +hh:mm offsets,
  /// or no offset) and "YYYY-MM-DD HH:MM:SS".
  static std::optional<Timestamp> parse(std::string_view text);
  static Timestamp from_civil(int year, unsigned month, unsigned day, int hour, int minute,
                              double second = 0.0);

  /// Inverse of parse: naive values print without a zone, UTC as "Z".
  std::string to_string() const;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

struct GpsPoint {
  std::string user_id;
  Timestamp time;
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GpsPoint&, const GpsPoint&) = default;
};

struct UserTrajectory {
  std::string user_id;
  std::vector<GpsPoint> points;

  /// Stable sort by absolute instant.
  void sort();
};

struct CellStats {
  double cell_x = 0.0;
  double cell_y = 0.0;
  double stay_time_s = 0.0;
  std::size_t unique_nights = 0;
  std::size_t total_points = 0;

  friend bool operator==(const CellStats&, const CellStats&) = default;
};

enum class InferenceSource : std::uint8_t { Night, Weekend, None };
enum class RefinementMethod : std::uint8_t { DensestBinCentroid, MeanCellPoints, GridCentroid, NotApplicable };
enum class Algorithm : std::uint8_t { Ghost, A1, A2, Dbscan, KMeansPP, Frequency };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Ghost,    Algorithm::A1,
                                               Algorithm::A2,       Algorithm::Dbscan,
                                               Algorithm::KMeansPP, Algorithm::Frequency};

std::string_view to_string(InferenceSource s);
std::string_view to_string(RefinementMethod m);
std::string_view to_string(Algorithm a);
std::optional<InferenceSource> parse_inference_source(std::string_view s);
std::optional<RefinementMethod> parse_refinement_method(std::string_view s);
std::optional<Algorithm> parse_algorithm(std::string_view s);

struct HomeEstimate {
  std::string user_id;
  std::optional<double> home_lat;
  std::optional<double> home_lon;
  InferenceSource inference_source = InferenceSource::None;
  RefinementMethod refinement_method = RefinementMethod::NotApplicable;
  std::optional<CellStats> winning_cell;
  Algorithm algorithm = Algorithm::Ghost;

  bool detected() const { return inference_source != InferenceSource::None; }
  static HomeEstimate undetected(std::string user_id, Algorithm algorithm);

  friend bool operator==(const HomeEstimate&, const HomeEstimate&) = default;
};

struct A1Params {
  double bandwidth_m = 20.0;
  friend bool operator==(const A1Params&, const A1Params&) = default;
};

struct A2Params {
  double stay_dist_m = 50.0;
  double stay_time_min = 10.0;
  double region_radius_m = 50.0;
  friend bool operator==(const A2Params&, const A2Params&) = default;
};

struct DbscanParams {
  double eps_m = 20.0;
  int min_pts = 4;
  friend bool operator==(const DbscanParams&, const DbscanParams&) = default;
};

struct KMeansParams {
  int k = 1;
  std::uint64_t random_state = 42;
  int n_init = 10;
  friend bool operator==(const KMeansParams&, const KMeansParams&) = default;
};

/// Every tunable of every detector. Defaults are the grid detector's frozen profile
/// (50 m cells, 22:00-06:00 nights, Saturday/Sunday 08:00-20:00 fallback).
struct DetectionParams {
  double grid_size = 50.0;
  int night_start_hour = 22;
  int night_end_hour = 6;
  int weekend_start_hour = 8;
  int weekend_end_hour = 20;
  std::bitset<7> weekend_days{0b1100000};  // bit d = day-of-week d (Monday = 0)
  A1Params a1;
  A2Params a2;
  DbscanParams dbscan;
  KMeansParams kmeans;

  /// Throws Error(InvalidParameter) naming the first offending field.
  void validate() const;

  friend bool operator==(const DetectionParams&, const DetectionParams&) = default;
};

struct ValidationRecord {
  std::string user_id;
  double predicted_lat = 0.0;
  double predicted_lon = 0.0;
  double true_lat = 0.0;
  double true_lon = 0.0;
  double error_m = 0.0;
};

/// One input row before validation. Absent optionals are missing fields.
struct RawRecord {
  std::optional<std::string> user_id;
  std::optional<std::string> timestamp;
  std::optional<std::string> lat;
  std::optional<std::string> lon;
};

struct Rejection {
  ErrorKind kind;
  std::string field;
};

std::variant<GpsPoint, Rejection> validate_point(const RawRecord& raw);

bool valid_latitude(double lat);
bool valid_longitude(double lon);

/// Locale-independent full-string double parse.
std::optional<double> parse_double(std::string_view text);

}  // namespace ghost
