#include "ghost/grid_detector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "ghost/temporal.hpp"

namespace ghost {

std::int64_t grid_index(double coord, double g) { return static_cast<std::int64_t>(std::round(coord / g)); }

GridKey grid_key(const ProjectedPoint& p, double g) { return {grid_index(p.x, g), grid_index(p.y, g)}; }

CellPoints assign_cells(std::span<const ProjectedPoint> points, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::NonPositiveGridSize, "grid size must be > 0");
  CellPoints cells;
  for (const auto& p : points) cells[grid_key(p, g)].push_back(p);
  return cells;
}

CellStatsMap cell_stats(const CellPoints& cells, double g) {
  CellStatsMap out;
  for (const auto& [key, pts] : cells) {
    if (pts.empty()) continue;
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.time.instant_us() < b.time.instant_us();
    });
    std::set<std::int64_t> dates;
    for (const auto& p : pts) dates.insert(p.time.local_day());

    CellStats s;
    s.cell_x = key.cell_x(g);
    s.cell_y = key.cell_y(g);
    s.stay_time_s = static_cast<double>(hi->time.instant_us() - lo->time.instant_us()) * 1e-6;
    s.unique_nights = dates.size();
    s.total_points = pts.size();
    out.emplace(key, s);
  }
  return out;
}

GridKey select_home_cell(const CellStatsMap& stats) {
  if (stats.empty()) throw Error(ErrorKind::EmptyInput, "no cells to select from");
  // Map iteration is ascending (cell_y, cell_x); strict > keeps the first of equals.
  auto best = stats.begin();
  auto rank = [](const CellStats& s) { return std::tuple(s.stay_time_s, s.unique_nights, s.total_points); };
  for (auto it = std::next(stats.begin()); it != stats.end(); ++it)
    if (rank(it->second) > rank(best->second)) best = it;
  return best->first;
}

double refinement_bin_size(double g) { return std::max(3.0, g / 10.0); }

RefinementOutcome refine_in_cell(std::span<const ProjectedPoint> points_in_cell, const GridKey& key, double g) {
  if (points_in_cell.empty()) throw Error(ErrorKind::EmptyCell, "winning cell has no points");

  const double cx = key.cell_x(g);
  const double cy = key.cell_y(g);
  RefinementOutcome out;

  if (points_in_cell.size() < 3) {
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points_in_cell) {
      sx += p.x;
      sy += p.y;
    }
    const auto n = static_cast<double>(points_in_cell.size());
    out = {sx / n, sy / n, RefinementMethod::MeanCellPoints};
  } else {
    const double side = refinement_bin_size(g);
    const auto bins = static_cast<std::int64_t>(std::ceil(g / side));
    const double x0 = cx - g / 2.0;
    const double y0 = cy - g / 2.0;
    auto bin_of = [&](double v, double origin) {
      auto b = static_cast<std::int64_t>(std::floor((v - origin) / side));
      return std::clamp<std::int64_t>(b, 0, bins - 1);
    };

    // (row, col) -> count and coordinate sums; std::map keeps row-major order for ties.
    struct Acc {
      std::size_t count = 0;
      double sx = 0.0;
      double sy = 0.0;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, Acc> census;
    for (const auto& p : points_in_cell) {
      auto& a = census[{bin_of(p.y, y0), bin_of(p.x, x0)}];
      ++a.count;
      a.sx += p.x;
      a.sy += p.y;
    }
    auto best = census.begin();
    for (auto it = census.begin(); it != census.end(); ++it)
      if (it->second.count > best->second.count) best = it;
    const auto n = static_cast<double>(best->second.count);
    out = {best->second.sx / n, best->second.sy / n, RefinementMethod::DensestBinCentroid};
  }

  if (!std::isfinite(out.x) || !std::isfinite(out.y)) out = {cx, cy, RefinementMethod::GridCentroid};
  return out;
}

HomeEstimate detect_home(const UserTrajectory& t, const DetectionParams& p) {
  HomeEstimate est = HomeEstimate::undetected(t.user_id, Algorithm::Ghost);

  std::vector<GpsPoint> filtered = filter_night(t, night_window(p));
  InferenceSource source = InferenceSource::Night;
  if (filtered.empty()) {
    filtered = filter_weekend(t, weekend_window(p), p.weekend_days);
    source = InferenceSource::Weekend;
  }
  if (filtered.empty()) return est;

  // Origin from the whole trajectory so night and weekend runs share one frame.
  const auto proj = LocalProjection::around(t.points);
  std::vector<ProjectedPoint> projected;
  projected.reserve(filtered.size());
  for (std::size_t i = 0; i < filtered.size(); ++i) projected.push_back(proj.forward(filtered[i], i));

  const double g = p.grid_size;
  const CellPoints cells = assign_cells(projected, g);
  const CellStatsMap stats = cell_stats(cells, g);
  const GridKey home = select_home_cell(stats);
  const RefinementOutcome refined = refine_in_cell(cells.at(home), home, g);
  const LatLon ll = proj.inverse(refined.x, refined.y);

  est.home_lat = ll.lat;
  est.home_lon = ll.lon;
  est.inference_source = source;
  est.refinement_method = refined.method;
  est.winning_cell = stats.at(home);
  return est;
}

}  // namespace ghost
