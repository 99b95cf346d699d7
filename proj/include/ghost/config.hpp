/**
 * @file config.hpp
 * @brief Layered application configuration: built-in defaults, then a YAML
 *        file, then command-line flags. Unknown keys are errors.
 *
 * Keys use the dotted spelling of the YAML tree, e.g. "grid_size",
 * "dbscan.eps_m", "kmeans.random_state". Command-line flags are the same keys
 * in kebab case ("--dbscan-eps-m").
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghost/core.hpp"
#include "ghost/ingest.hpp"
#include "ghost/sweep.hpp"

namespace ghost {

struct AppConfig {
  std::vector<std::filesystem::path> inputs;
  Algorithm algorithm = Algorithm::Ghost;
  DetectionParams params;
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> results;
  std::filesystem::path output_dir = ".";
  std::optional<ParamGrid> sweep_grid;
  std::vector<double> thresholds = kDefaultThresholds;
  std::uint64_t seed = 42;
  double train_fraction = 0.8;
  int threads = 0;
  ColumnMap columns;

  /// Informational messages produced while resolving (e.g. skipped sweep sections).
  std::vector<std::string> notices;
};

using FlagList = std::vector<std::pair<std::string, std::string>>;

/// defaults -> file -> flags. Throws Error(UnknownKey / TypeMismatch / FileNotFound / InvalidParameter).
AppConfig resolve_config(const std::optional<std::filesystem::path>& file, const FlagList& flags = {});

/// Same as resolve_config but reads the file layer from a YAML string.
AppConfig resolve_config_text(const std::string& yaml, const FlagList& flags = {});

/// "dbscan.eps_m" <-> "dbscan-eps-m".
std::string key_to_flag(const std::string& key);
std::string flag_to_key(const std::string& flag);

/// Every scalar or list key accepted from the command line.
const std::vector<std::string>& flag_keys();

/// YAML profile (algorithm + every detection parameter) readable by resolve_config.
std::string profile_yaml(Algorithm algo, const DetectionParams& p);

}  // namespace ghost
