/**
 * @file baselines.hpp
 * @brief Comparison detectors: flat-kernel mean-shift (A1), stay-point regions
 *        (A2), DBSCAN, K-Means++ and most-frequent-coordinate.
 *
 * All of them run on night-window points only; none use the weekend fallback.
 * The clustering kernels are exposed separately from the detect functions so
 * they can be checked against reference implementations.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/geo.hpp"
#include "ghost/temporal.hpp"

namespace ghost {

struct Cluster {
  Vec2 center;
  std::vector<std::size_t> member_indices;
};

struct StayPoint {
  Vec2 center;
  Timestamp arrival;
  Timestamp departure;
  double dwell_s = 0.0;
  std::size_t first_index = 0;  ///< anchor index into the projected trajectory
  std::size_t last_index = 0;   ///< inclusive
};

struct StayRegion {
  Vec2 centroid;
  std::vector<StayPoint> stay_points;
  double night_dwell_s = 0.0;
  double total_dwell_s = 0.0;
};

// --- mean-shift -------------------------------------------------------------

inline constexpr double kMeanShiftTolerance = 1e-3;
inline constexpr int kMeanShiftMaxIter = 300;

/// Runs a flat-kernel seed from `seed` to convergence.
Vec2 mean_shift_converge(std::span<const Vec2> points, Vec2 seed, double bandwidth);

/// Seeds at every point, merges modes closer than the bandwidth, assigns each
/// point to its nearest surviving mode. Clusters ordered by mode priority.
std::vector<Cluster> mean_shift(std::span<const Vec2> points, double bandwidth);

// --- stay points / regions ---------------------------------------------------

std::vector<StayPoint> extract_stay_points(std::span<const ProjectedPoint> points, double stay_dist_m,
                                           double stay_time_min);

/// Seconds of [arrival, departure] that fall inside occurrences of the window.
double window_overlap_seconds(const Timestamp& arrival, const Timestamp& departure, const HourWindow& w);

/// Single-linkage grouping with merge cutoff `radius_m`, then per-region dwell sums.
std::vector<StayRegion> group_stay_regions(std::span<const StayPoint> stays, double radius_m,
                                           const HourWindow& night);

// --- DBSCAN -----------------------------------------------------------------

inline constexpr int kNoise = -1;

/// Labels in [0, clusters) or kNoise. Region queries are inclusive (d <= eps) and
/// count the query point itself. Points are visited in index order.
std::vector<int> dbscan_labels(std::span<const Vec2> points, double eps, int min_pts);

// --- K-Means++ --------------------------------------------------------------

struct KMeansResult {
  std::vector<Vec2> centroids;
  std::vector<int> labels;
  double inertia = 0.0;
  int iterations = 0;
};

inline constexpr int kLloydMaxIter = 300;

/// K-Means++ seeding plus Lloyd iterations, best inertia over n_init restarts.
/// Throws Error(KExceedsPoints) when k exceeds the number of points.
KMeansResult kmeans_pp(std::span<const Vec2> points, int k, std::uint64_t random_state, int n_init);

// --- detectors --------------------------------------------------------------

HomeEstimate a1_detect(const UserTrajectory& t, const DetectionParams& p);
HomeEstimate a2_detect(const UserTrajectory& t, const DetectionParams& p);
HomeEstimate dbscan_detect(const UserTrajectory& t, const DetectionParams& p);
HomeEstimate kmeanspp_detect(const UserTrajectory& t, const DetectionParams& p);
HomeEstimate frequency_detect(const UserTrajectory& t, const DetectionParams& p);

}  // namespace ghost
