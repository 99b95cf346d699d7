/**
 * @file ingest.hpp
 * @brief CSV / GPX / directory loaders producing sorted per-user trajectories.
 *
 * Bad records are counted in the IngestSummary and skipped; only file-level
 * problems (missing file, malformed XML, nothing usable) throw ghost::Error.
 */
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghost/core.hpp"

namespace ghost {

struct IngestSummary {
  std::size_t files_read = 0;
  std::size_t records_accepted = 0;
  std::size_t records_rejected = 0;
  std::size_t users = 0;
  std::map<std::string, std::size_t> rejection_breakdown;

  void reject(ErrorKind kind);
  void merge(const IngestSummary& other);
};

/// Header names for the four required columns.
struct ColumnMap {
  std::string user_id = "user_id";
  std::string timestamp = "timestamp";
  std::string latitude = "latitude";
  std::string longitude = "longitude";
};

template <typename T>
struct Loaded {
  T data;
  IngestSummary summary;
};

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

/// One trajectory per user_id, users in lexicographic order.
Loaded<std::vector<UserTrajectory>> parse_csv(const std::filesystem::path& path, const ColumnMap& columns = {});

/// Trackpoints (trk/trkseg/trkpt); user id is `user_id` or else the file stem.
Loaded<UserTrajectory> parse_gpx(const std::filesystem::path& path, std::optional<std::string> user_id = {});

/// Every *.gpx and *.csv directly inside `dir`, merged per user and sorted.
Loaded<std::vector<UserTrajectory>> load_directory(const std::filesystem::path& dir, const ColumnMap& columns = {});

/// File or directory, dispatched on type / extension.
Loaded<std::vector<UserTrajectory>> load_input(const std::filesystem::path& path, const ColumnMap& columns = {});

/// Merges same-user trajectories, stable-sorts points, orders by user_id.
std::vector<UserTrajectory> merge_trajectories(std::vector<UserTrajectory> parts);

/// Writes the ingestion CSV schema (user_id,timestamp,latitude,longitude).
void write_points_csv(const std::filesystem::path& path, const std::vector<UserTrajectory>& users);

}  // namespace ghost
