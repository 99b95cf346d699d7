#include "ghost/batch.hpp"

#include <omp.h>

#include <optional>

#include "ghost/baselines.hpp"
#include "ghost/grid_detector.hpp"

namespace ghost {

HomeEstimate detect(Algorithm algo, const UserTrajectory& t, const DetectionParams& p) {
  switch (algo) {
    case Algorithm::Ghost: return detect_home(t, p);
    case Algorithm::A1: return a1_detect(t, p);
    case Algorithm::A2: return a2_detect(t, p);
    case Algorithm::Dbscan: return dbscan_detect(t, p);
    case Algorithm::KMeansPP: return kmeanspp_detect(t, p);
    case Algorithm::Frequency: return frequency_detect(t, p);
  }
  return HomeEstimate::undetected(t.user_id, algo);
}

namespace {

HomeEstimate detect_guarded(Algorithm algo, const UserTrajectory& t, const DetectionParams& p,
                            std::optional<std::string>& error) {
  try {
    return detect(algo, t, p);
  } catch (const Error& e) {
    error = e.what();
    return HomeEstimate::undetected(t.user_id, algo);
  }
}

BatchResult gather(std::vector<HomeEstimate> estimates, std::vector<std::optional<std::string>> errors) {
  BatchResult out{std::move(estimates), {}};
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) out.failures.push_back({out.estimates[i].user_id, *errors[i]});
  return out;
}

int g_default_threads = 0;

}  // namespace

BatchResult detect_batch_serial(std::span<const UserTrajectory> users, Algorithm algo, const DetectionParams& p) {
  p.validate();
  std::vector<HomeEstimate> est(users.size());
  std::vector<std::optional<std::string>> errors(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) est[i] = detect_guarded(algo, users[i], p, errors[i]);
  return gather(std::move(est), std::move(errors));
}

BatchResult detect_batch_parallel(std::span<const UserTrajectory> users, Algorithm algo, const DetectionParams& p,
                                  int threads) {
  p.validate();
  if (threads <= 0) threads = default_thread_count();
  const auto n = static_cast<std::ptrdiff_t>(users.size());
  std::vector<HomeEstimate> est(users.size());
  std::vector<std::optional<std::string>> errors(users.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    est[u] = detect_guarded(algo, users[u], p, errors[u]);
  }
  return gather(std::move(est), std::move(errors));
}

int default_thread_count() { return g_default_threads > 0 ? g_default_threads : omp_get_max_threads(); }
void set_default_thread_count(int threads) { g_default_threads = threads; }

}  // namespace ghost
