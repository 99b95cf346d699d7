/**
 * @file export.hpp
 * @brief Results CSV (write / read back) and map export as GeoJSON + HTML.
 */
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ghost/core.hpp"

namespace ghost {

/// Columns: user_id, home_lat, home_lon, inference_source, refinement_method,
/// stay_time_s, unique_nights, total_points, algorithm. Rows sorted by user_id.
std::string results_csv(std::span<const HomeEstimate> estimates);
void write_results_csv(const std::filesystem::path& path, std::span<const HomeEstimate> estimates);

/// Throws Error(MalformedResults) on a bad header or row.
std::vector<HomeEstimate> read_results_csv(const std::filesystem::path& path);

/// RFC 7946 FeatureCollection: one Point per detected home, plus one
/// LineString per user trace when `traces` is non-empty.
std::string homes_geojson(std::span<const HomeEstimate> estimates, std::span<const UserTrajectory> traces = {});

/// Self-contained page drawing the GeoJSON over a tile map.
std::string map_html(const std::string& geojson, std::span<const HomeEstimate> estimates);

}  // namespace ghost
