/**
 * @file grid_detector.hpp
 * @brief Grid-based home detection by maximum stay-time.
 *
 * Pipeline per user: night filter (falling back to weekend daytime, then to no
 * estimate), projection to a local plane, square-cell binning, per-cell
 * stay-time statistics, hierarchical cell selection, densest sub-bin refinement
 * inside the winning cell, and inverse projection.
 */
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/geo.hpp"

namespace ghost {

/**
 * @brief Grid cell identifier stored as integer multiples of the cell size.
 *
 * The cell center is (ix * g, iy * g) with ix = round_half_away(x / g).
 * Ordering is (iy, ix), which is also the residual tie-break order.
 */
struct GridKey {
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  double cell_x(double g) const { return static_cast<double>(ix) * g; }
  double cell_y(double g) const { return static_cast<double>(iy) * g; }

  friend bool operator==(const GridKey&, const GridKey&) = default;
  friend bool operator<(const GridKey& a, const GridKey& b) {
    return a.iy != b.iy ? a.iy < b.iy : a.ix < b.ix;
  }
};

using CellPoints = std::map<GridKey, std::vector<ProjectedPoint>>;
using CellStatsMap = std::map<GridKey, CellStats>;

struct RefinementOutcome {
  double x = 0.0;
  double y = 0.0;
  RefinementMethod method = RefinementMethod::GridCentroid;
};

/// std::round semantics: halves go away from zero.
std::int64_t grid_index(double coord, double g);
GridKey grid_key(const ProjectedPoint& p, double g);

/// Throws Error(NonPositiveGridSize).
CellPoints assign_cells(std::span<const ProjectedPoint> points, double g);
CellStatsMap cell_stats(const CellPoints& cells, double g);
/// Lexicographic max of (stay_time, unique_nights, total_points); then smallest (cell_y, cell_x).
GridKey select_home_cell(const CellStatsMap& stats);

/// Sub-bin side length used inside a cell of size g.
double refinement_bin_size(double g);

/// Throws Error(EmptyCell) on an empty point list.
RefinementOutcome refine_in_cell(std::span<const ProjectedPoint> points_in_cell, const GridKey& key, double g);

HomeEstimate detect_home(const UserTrajectory& t, const DetectionParams& p);

}  // namespace ghost
