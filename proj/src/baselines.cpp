#include "ghost/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>

#include "ghost/rng.hpp"

namespace ghost {

namespace {

constexpr std::int64_t kUsPerHour = 3600LL * 1'000'000;
constexpr std::int64_t kUsPerDay = 24 * kUsPerHour;

double dist2(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

bool yx_less(const Vec2& a, const Vec2& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

/// Night-window points of a user projected around the mean of all the user's points.
struct NightFrame {
  LocalProjection proj;
  std::vector<Vec2> xy;
};

std::optional<NightFrame> night_frame(const UserTrajectory& t, const DetectionParams& p) {
  auto night = filter_night(t, night_window(p));
  if (night.empty()) return std::nullopt;
  NightFrame f{LocalProjection::around(t.points), {}};
  f.xy.reserve(night.size());
  for (const auto& g : night) f.xy.push_back(f.proj.forward(g.lat, g.lon));
  return f;
}

HomeEstimate night_estimate(const std::string& user, Algorithm algo, const LocalProjection& proj, Vec2 home) {
  HomeEstimate e = HomeEstimate::undetected(user, algo);
  const LatLon ll = proj.inverse(home.x, home.y);
  e.home_lat = ll.lat;
  e.home_lon = ll.lon;
  e.inference_source = InferenceSource::Night;
  return e;
}

/// Largest cluster wins; ties go to the smaller (y, x) center.
template <typename Size, typename Center>
std::size_t pick_largest(std::size_t count, Size size_of, Center center_of) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    const auto si = size_of(i);
    const auto sb = size_of(best);
    if (si > sb || (si == sb && yx_less(center_of(i), center_of(best)))) best = i;
  }
  return best;
}

Vec2 mean_of(std::span<const Vec2> pts, std::span<const std::size_t> idx) {
  double sx = 0.0, sy = 0.0;
  for (auto i : idx) {
    sx += pts[i].x;
    sy += pts[i].y;
  }
  const auto n = static_cast<double>(idx.size());
  return {sx / n, sy / n};
}

/// Uniform-grid index over points for fixed-radius queries.
class RadiusIndex {
 public:
  RadiusIndex(std::span<const Vec2> pts, double radius) : pts_(pts), radius_(radius), r2_(radius * radius) {
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(pts[i])].push_back(i);
  }

  /// Indices within radius (inclusive) of pts[i], ascending.
  void query(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const auto [cx, cy] = key(pts_[i]);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = buckets_.find({cx + dx, cy + dy});
        if (it == buckets_.end()) continue;
        for (auto j : it->second)
          if (dist2(pts_[i], pts_[j]) <= r2_) out.push_back(j);
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::pair<std::int64_t, std::int64_t> key(const Vec2& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / radius_)), static_cast<std::int64_t>(std::floor(p.y / radius_))};
  }

  std::span<const Vec2> pts_;
  double radius_;
  double r2_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> buckets_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Mean-shift

Vec2 mean_shift_converge(std::span<const Vec2> points, Vec2 seed, double bandwidth) {
  const double r2 = bandwidth * bandwidth;
  Vec2 cur = seed;
  for (int iter = 0; iter < kMeanShiftMaxIter; ++iter) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (const auto& p : points) {
      if (dist2(p, cur) <= r2) {
        sx += p.x;
        sy += p.y;
        ++n;
      }
    }
    if (n == 0) break;
    const Vec2 next{sx / static_cast<double>(n), sy / static_cast<double>(n)};
    const double shift = std::sqrt(dist2(next, cur));
    cur = next;
    if (shift < kMeanShiftTolerance) break;
  }
  return cur;
}

std::vector<Cluster> mean_shift(std::span<const Vec2> points, double bandwidth) {
  const std::size_t n = points.size();
  if (n == 0) return {};
  const double r2 = bandwidth * bandwidth;

  std::vector<Vec2> modes(n);
  std::vector<std::size_t> basin(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    modes[i] = mean_shift_converge(points, points[i], bandwidth);
    for (const auto& p : points)
      if (dist2(p, modes[i]) <= r2) ++basin[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (basin[a] != basin[b]) return basin[a] > basin[b];
    return yx_less(modes[a], modes[b]);
  });

  std::vector<Vec2> kept;
  for (auto i : order) {
    bool merged = false;
    for (const auto& k : kept) {
      if (dist2(k, modes[i]) < r2) {
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(modes[i]);
  }

  std::vector<Cluster> clusters(kept.size());
  for (std::size_t c = 0; c < kept.size(); ++c) clusters[c].center = kept[c];
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = dist2(points[i], kept[0]);
    for (std::size_t c = 1; c < kept.size(); ++c) {
      const double d = dist2(points[i], kept[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    clusters[best].member_indices.push_back(i);
  }
  std::erase_if(clusters, [](const Cluster& c) { return c.member_indices.empty(); });
  return clusters;
}

// ---------------------------------------------------------------------------
// Stay points

std::vector<StayPoint> extract_stay_points(std::span<const ProjectedPoint> points, double stay_dist_m,
                                           double stay_time_min) {
  std::vector<StayPoint> out;
  const std::size_t n = points.size();
  const double d2max = stay_dist_m * stay_dist_m;
  const double min_s = stay_time_min * 60.0;

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && dist2(points[j].xy(), points[i].xy()) <= d2max) ++j;
    const double span_s =
        static_cast<double>(points[j - 1].time.instant_us() - points[i].time.instant_us()) * 1e-6;
    if (j - i >= 2 && span_s >= min_s) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        sx += points[k].x;
        sy += points[k].y;
      }
      const auto cnt = static_cast<double>(j - i);
      out.push_back({{sx / cnt, sy / cnt}, points[i].time, points[j - 1].time, span_s, i, j - 1});
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

double window_overlap_seconds(const Timestamp& arrival, const Timestamp& departure, const HourWindow& w) {
  const std::int64_t a = arrival.wall_us;
  const std::int64_t b = departure.wall_us;
  if (b <= a) return 0.0;
  if (w.full_day()) return static_cast<double>(b - a) * 1e-6;

  const std::int64_t start_off = w.start_hour * kUsPerHour;
  const std::int64_t end_off = w.wraps() ? kUsPerDay + w.end_hour * kUsPerHour : w.end_hour * kUsPerHour;

  std::int64_t total = 0;
  for (std::int64_t day = arrival.local_day() - 1; day <= departure.local_day(); ++day) {
    const std::int64_t lo = std::max(a, day * kUsPerDay + start_off);
    const std::int64_t hi = std::min(b, day * kUsPerDay + end_off);
    if (hi > lo) total += hi - lo;
  }
  return static_cast<double>(total) * 1e-6;
}

std::vector<StayRegion> group_stay_regions(std::span<const StayPoint> stays, double radius_m,
                                           const HourWindow& night) {
  const std::size_t n = stays.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const double r2 = radius_m * radius_m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist2(stays[i].center, stays[j].center) <= r2) {
        auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::map<std::size_t, std::size_t> region_of_root;  // root -> region index, in first-member order
  std::vector<StayRegion> regions;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto [it, inserted] = region_of_root.try_emplace(root, regions.size());
    if (inserted) regions.emplace_back();
    auto& r = regions[it->second];
    r.stay_points.push_back(stays[i]);
    r.total_dwell_s += stays[i].dwell_s;
    r.night_dwell_s += window_overlap_seconds(stays[i].arrival, stays[i].departure, night);
  }
  for (auto& r : regions) {
    double sx = 0.0, sy = 0.0;
    for (const auto& s : r.stay_points) {
      sx += s.center.x;
      sy += s.center.y;
    }
    const auto cnt = static_cast<double>(r.stay_points.size());
    r.centroid = {sx / cnt, sy / cnt};
  }
  return regions;
}

// ---------------------------------------------------------------------------
// DBSCAN

std::vector<int> dbscan_labels(std::span<const Vec2> points, double eps, int min_pts) {
  constexpr int kUnvisited = -2;
  const std::size_t n = points.size();
  std::vector<int> label(n, kUnvisited);
  if (n == 0) return label;

  const RadiusIndex index(points, eps);
  const auto threshold = static_cast<std::size_t>(std::max(min_pts, 1));
  std::vector<std::size_t> neighbors;
  std::vector<std::size_t> seeds;
  int cluster = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    index.query(i, neighbors);
    if (neighbors.size() < threshold) {
      label[i] = kNoise;
      continue;
    }
    label[i] = cluster;
    seeds.assign(neighbors.begin(), neighbors.end());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t q = seeds[s];
      if (label[q] == kNoise) label[q] = cluster;
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      index.query(q, neighbors);
      if (neighbors.size() >= threshold) seeds.insert(seeds.end(), neighbors.begin(), neighbors.end());
    }
    ++cluster;
  }
  return label;
}

// ---------------------------------------------------------------------------
// K-Means++

namespace {

KMeansResult kmeans_single(std::span<const Vec2> points, int k, SplitMix64& rng) {
  const std::size_t n = points.size();
  KMeansResult r;
  r.centroids.reserve(static_cast<std::size_t>(k));
  r.centroids.push_back(points[rng.below(n)]);

  std::vector<double> d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = dist2(points[i], r.centroids[0]);
      for (std::size_t j = 1; j < r.centroids.size(); ++j) best = std::min(best, dist2(points[i], r.centroids[j]));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.below(n);
    } else {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding left target at the very end
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
    }
    r.centroids.push_back(points[pick]);
  }

  r.labels.assign(n, -1);
  for (int iter = 0; iter < kLloydMaxIter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist2(points[i], r.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(points[i], r.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.labels[i] != best) {
        r.labels[i] = best;
        changed = true;
      }
    }
    r.iterations = iter + 1;
    if (!changed) break;

    std::vector<double> sx(static_cast<std::size_t>(k), 0.0), sy(static_cast<std::size_t>(k), 0.0);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      sx[c] += points[i].x;
      sy[c] += points[i].y;
      ++cnt[c];
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
      if (cnt[c] > 0) r.centroids[c] = {sx[c] / static_cast<double>(cnt[c]), sy[c] / static_cast<double>(cnt[c])};
  }

  r.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) r.inertia += dist2(points[i], r.centroids[static_cast<std::size_t>(r.labels[i])]);
  return r;
}

}  // namespace

KMeansResult kmeans_pp(std::span<const Vec2> points, int k, std::uint64_t random_state, int n_init) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
  if (static_cast<std::size_t>(k) > points.size())
    throw Error(ErrorKind::KExceedsPoints,
                "k=" + std::to_string(k) + " exceeds point count " + std::to_string(points.size()));

  SplitMix64 seeder(random_state);
  std::optional<KMeansResult> best;
  for (int restart = 0; restart < std::max(n_init, 1); ++restart) {
    SplitMix64 rng(seeder.next());
    KMeansResult r = kmeans_single(points, k, rng);
    if (!best || r.inertia < best->inertia) best = std::move(r);
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Detectors

HomeEstimate a1_detect(const UserTrajectory& t, const DetectionParams& p) {
  auto frame = night_frame(t, p);
  if (!frame) return HomeEstimate::undetected(t.user_id, Algorithm::A1);
  const auto clusters = mean_shift(frame->xy, p.a1.bandwidth_m);
  const auto best = pick_largest(
      clusters.size(), [&](std::size_t i) { return clusters[i].member_indices.size(); },
      [&](std::size_t i) { return clusters[i].center; });
  return night_estimate(t.user_id, Algorithm::A1, frame->proj, clusters[best].center);
}

HomeEstimate a2_detect(const UserTrajectory& t, const DetectionParams& p) {
  HomeEstimate none = HomeEstimate::undetected(t.user_id, Algorithm::A2);
  if (t.points.empty()) return none;

  const auto proj = LocalProjection::around(t.points);
  std::vector<ProjectedPoint> pts;
  pts.reserve(t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) pts.push_back(proj.forward(t.points[i], i));

  const auto stays = extract_stay_points(pts, p.a2.stay_dist_m, p.a2.stay_time_min);
  if (stays.empty()) return none;
  const auto regions = group_stay_regions(stays, p.a2.region_radius_m, night_window(p));

  constexpr double kMinNightDwell = 3.0 * 3600.0;
  constexpr double kMinTotalDwell = 24.0 * 3600.0;
  const StayRegion* best = nullptr;
  for (const auto& r : regions) {
    if (r.night_dwell_s < kMinNightDwell && r.total_dwell_s < kMinTotalDwell) continue;
    if (!best) {
      best = &r;
      continue;
    }
    const auto lhs = std::tuple(r.night_dwell_s, r.total_dwell_s);
    const auto rhs = std::tuple(best->night_dwell_s, best->total_dwell_s);
    if (lhs > rhs || (lhs == rhs && yx_less(r.centroid, best->centroid))) best = &r;
  }
  if (!best) return none;
  return night_estimate(t.user_id, Algorithm::A2, proj, best->centroid);
}

HomeEstimate dbscan_detect(const UserTrajectory& t, const DetectionParams& p) {
  auto frame = night_frame(t, p);
  if (!frame) return HomeEstimate::undetected(t.user_id, Algorithm::Dbscan);
  const auto labels = dbscan_labels(frame->xy, p.dbscan.eps_m, p.dbscan.min_pts);

  const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (n_clusters <= 0) return HomeEstimate::undetected(t.user_id, Algorithm::Dbscan);

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(i);
  std::vector<Vec2> centers;
  for (const auto& m : members) centers.push_back(mean_of(frame->xy, m));

  const auto best = pick_largest(
      members.size(), [&](std::size_t i) { return members[i].size(); }, [&](std::size_t i) { return centers[i]; });
  return night_estimate(t.user_id, Algorithm::Dbscan, frame->proj, centers[best]);
}

HomeEstimate kmeanspp_detect(const UserTrajectory& t, const DetectionParams& p) {
  auto frame = night_frame(t, p);
  if (!frame) return HomeEstimate::undetected(t.user_id, Algorithm::KMeansPP);
  const auto km = kmeans_pp(frame->xy, p.kmeans.k, p.kmeans.random_state, p.kmeans.n_init);

  std::vector<std::size_t> sizes(km.centroids.size(), 0);
  for (int l : km.labels) ++sizes[static_cast<std::size_t>(l)];
  const auto best = pick_largest(
      sizes.size(), [&](std::size_t i) { return sizes[i]; }, [&](std::size_t i) { return km.centroids[i]; });
  return night_estimate(t.user_id, Algorithm::KMeansPP, frame->proj, km.centroids[best]);
}

HomeEstimate frequency_detect(const UserTrajectory& t, const DetectionParams& p) {
  HomeEstimate est = HomeEstimate::undetected(t.user_id, Algorithm::Frequency);
  const auto night = filter_night(t, night_window(p));
  if (night.empty()) return est;

  struct Tally {
    std::size_t count = 0;
    std::int64_t first_us = 0;
    std::size_t first_pos = 0;
  };
  using Key = std::pair<std::int64_t, std::int64_t>;
  std::map<Key, Tally> tally;
  for (std::size_t i = 0; i < night.size(); ++i) {
    const Key key{std::llround(night[i].lat * 1e6), std::llround(night[i].lon * 1e6)};
    const auto us = night[i].time.instant_us();
    auto [it, inserted] = tally.try_emplace(key, Tally{0, us, i});
    ++it->second.count;
    if (us < it->second.first_us) it->second.first_us = us;
  }

  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it) {
    const auto& a = it->second;
    const auto& b = best->second;
    if (a.count > b.count ||
        (a.count == b.count && std::tuple(a.first_us, a.first_pos) < std::tuple(b.first_us, b.first_pos)))
      best = it;
  }
  est.home_lat = static_cast<double>(best->first.first) / 1e6;
  est.home_lon = static_cast<double>(best->first.second) / 1e6;
  est.inference_source = InferenceSource::Night;
  return est;
}

}  // namespace ghost
