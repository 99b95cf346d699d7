#include "oracles.hpp"

#include <cmath>
#include <map>

namespace oracle {

std::int64_t nearest_index(double v) {
  const auto base = static_cast<std::int64_t>(std::floor(v));
  std::int64_t best = base;
  for (std::int64_t c = base - 1; c <= base + 2; ++c) {
    const double d = std::fabs(v - static_cast<double>(c));
    const double db = std::fabs(v - static_cast<double>(best));
    if (d < db || (d == db && std::llabs(c) > std::llabs(best))) best = c;
  }
  return best;
}

namespace {

std::int64_t civil_day(const ghost::Timestamp& t) {
  constexpr std::int64_t kDay = 86'400'000'000LL;
  std::int64_t q = t.wall_us / kDay;
  if (t.wall_us % kDay != 0 && t.wall_us < 0) --q;
  return q;
}

}  // namespace

std::vector<Cell> cells(std::span<const ghost::ProjectedPoint> pts, double g) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ix = nearest_index(pts[i].x / g);
    const auto iy = nearest_index(pts[i].y / g);
    Cell* found = nullptr;
    for (auto& c : out)
      if (c.ix == ix && c.iy == iy) found = &c;
    if (!found) {
      out.push_back({ix, iy, {}, 0.0, 0});
      found = &out.back();
    }
    found->members.push_back(i);
  }
  for (auto& c : out) {
    std::int64_t lo = pts[c.members[0]].time.instant_us();
    std::int64_t hi = lo;
    std::vector<std::int64_t> days;
    for (auto m : c.members) {
      lo = std::min(lo, pts[m].time.instant_us());
      hi = std::max(hi, pts[m].time.instant_us());
      const auto d = civil_day(pts[m].time);
      bool seen = false;
      for (auto x : days) seen = seen || x == d;
      if (!seen) days.push_back(d);
    }
    c.stay_s = static_cast<double>(hi - lo) / 1e6;
    c.nights = days.size();
  }
  return out;
}

const Cell& select(const std::vector<Cell>& cs) {
  const Cell* best = &cs.front();
  for (const auto& c : cs) {
    bool better = false;
    if (c.stay_s != best->stay_s) better = c.stay_s > best->stay_s;
    else if (c.nights != best->nights) better = c.nights > best->nights;
    else if (c.members.size() != best->members.size()) better = c.members.size() > best->members.size();
    else if (c.iy != best->iy) better = c.iy < best->iy;
    else better = c.ix < best->ix;
    if (better) best = &c;
  }
  return *best;
}

std::vector<int> dbscan(std::span<const ghost::Vec2> pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j)
      if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= eps) out.push_back(j);
    return out;
  };
  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = neighbours(i);
    if (static_cast<int>(seeds.size()) < min_pts) {
      label[i] = -1;
      continue;
    }
    label[i] = cluster;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto q = seeds[k];
      if (label[q] == -1) label[q] = cluster;
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      auto more = neighbours(q);
      if (static_cast<int>(more.size()) >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  return label;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

double haversine(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kPi = 3.14159265358979323846;
  const double r = 6371000.0;
  const double p1 = lat1 * kPi / 180, p2 = lat2 * kPi / 180;
  const double dp = p2 - p1, dl = (lon2 - lon1) * kPi / 180;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2 * r * std::atan2(std::sqrt(a), std::sqrt(1 - a));
}

}  // namespace oracle
