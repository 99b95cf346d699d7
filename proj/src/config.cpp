#include "ghost/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ghost {

namespace {

const std::vector<std::string> kListKeys{"input", "thresholds", "weekend_days"};
const std::vector<std::string> kScalarKeys{
    "algorithm", "ground_truth", "results", "output_dir", "seed", "train_fraction", "threads",
    "columns.user_id", "columns.timestamp", "columns.latitude", "columns.longitude"};

bool is_param_key(const std::string& key) {
  const auto& keys = sweep_parameter_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

bool is_list_key(const std::string& key) { return std::find(kListKeys.begin(), kListKeys.end(), key) != kListKeys.end(); }

bool is_scalar_key(const std::string& key) {
  return is_param_key(key) || std::find(kScalarKeys.begin(), kScalarKeys.end(), key) != kScalarKeys.end();
}

double to_number(const std::string& key, const std::string& text) {
  auto v = parse_double(text);
  if (!v) throw Error(ErrorKind::TypeMismatch, key + " expects a number, got '" + text + "'");
  return *v;
}

std::int64_t to_integer(const std::string& key, const std::string& text) {
  const double v = to_number(key, text);
  if (std::floor(v) != v) throw Error(ErrorKind::TypeMismatch, key + " expects an integer, got '" + text + "'");
  return static_cast<std::int64_t>(v);
}

void apply_scalar(AppConfig& c, const std::string& key, const std::string& value) {
  if (is_param_key(key)) {
    set_parameter(c.params, key, to_number(key, value));
  } else if (key == "algorithm") {
    auto a = parse_algorithm(value);
    if (!a) throw Error(ErrorKind::TypeMismatch, "unknown algorithm '" + value + "'");
    c.algorithm = *a;
  } else if (key == "ground_truth") {
    c.ground_truth = value;
  } else if (key == "results") {
    c.results = value;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "seed") {
    const auto v = to_integer(key, value);
    if (v < 0) throw Error(ErrorKind::TypeMismatch, "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "train_fraction") {
    c.train_fraction = to_number(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<int>(to_integer(key, value));
  } else if (key == "columns.user_id") {
    c.columns.user_id = value;
  } else if (key == "columns.timestamp") {
    c.columns.timestamp = value;
  } else if (key == "columns.latitude") {
    c.columns.latitude = value;
  } else if (key == "columns.longitude") {
    c.columns.longitude = value;
  } else {
    throw Error(ErrorKind::UnknownKey, "unknown configuration key '" + key + "'");
  }
}

void apply_list(AppConfig& c, const std::string& key, const std::vector<std::string>& values) {
  if (key == "input") {
    c.inputs.assign(values.begin(), values.end());
  } else if (key == "thresholds") {
    c.thresholds.clear();
    for (const auto& v : values) c.thresholds.push_back(to_number(key, v));
  } else if (key == "weekend_days") {
    c.params.weekend_days.reset();
    for (const auto& v : values) {
      const auto d = to_integer(key, v);
      if (d < 0 || d > 6) throw Error(ErrorKind::InvalidParameter, "weekend_days entries must be in [0, 6]");
      c.params.weekend_days.set(static_cast<std::size_t>(d));
    }
  } else {
    throw Error(ErrorKind::UnknownKey, "unknown configuration key '" + key + "'");
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string algorithm_prefix(Algorithm a) {
  switch (a) {
    case Algorithm::A1: return "a1";
    case Algorithm::A2: return "a2";
    case Algorithm::Dbscan: return "dbscan";
    case Algorithm::KMeansPP: return "kmeans";
    default: return "";
  }
}

std::vector<std::string> scalar_list(const std::string& key, const YAML::Node& node) {
  std::vector<std::string> out;
  if (node.IsScalar()) {
    out.push_back(node.Scalar());
  } else if (node.IsSequence()) {
    for (const auto& item : node) {
      if (!item.IsScalar()) throw Error(ErrorKind::TypeMismatch, key + " must be a list of scalars");
      out.push_back(item.Scalar());
    }
  } else {
    throw Error(ErrorKind::TypeMismatch, key + " must be a scalar or a list");
  }
  return out;
}

ParamGrid parse_sweep(const YAML::Node& node, std::vector<std::string>& notices) {
  if (!node.IsMap()) throw Error(ErrorKind::TypeMismatch, "sweep must be a map of algorithm sections");
  const auto& canonical = sweep_parameter_keys();
  ParamGrid grid;
  for (auto algo : kAllAlgorithms) {
    const std::string name(to_string(algo));
    if (!node[name]) continue;
    const YAML::Node section = node[name];
    if (section.IsNull() || (section.IsMap() && section.size() == 0)) {
      notices.push_back("sweep section '" + name + "' is empty; skipping " + name);
      continue;
    }
    if (!section.IsMap()) throw Error(ErrorKind::TypeMismatch, "sweep." + name + " must be a map");

    AlgorithmGrid g{algo, {}};
    for (const auto& kv : section) {
      std::string key = kv.first.as<std::string>();
      if (!is_param_key(key) && is_param_key(algorithm_prefix(algo) + "." + key)) key = algorithm_prefix(algo) + "." + key;
      if (!is_param_key(key)) throw Error(ErrorKind::UnknownKey, "unknown sweep key 'sweep." + name + "." + key + "'");
      GridAxis axis{key, {}};
      for (const auto& v : scalar_list("sweep." + name + "." + key, kv.second)) axis.values.push_back(to_number(key, v));
      if (axis.values.empty()) throw Error(ErrorKind::InvalidParameter, "sweep." + name + "." + key + " is empty");
      g.axes.push_back(std::move(axis));
    }
    std::sort(g.axes.begin(), g.axes.end(), [&](const GridAxis& a, const GridAxis& b) {
      return std::find(canonical.begin(), canonical.end(), a.key) < std::find(canonical.begin(), canonical.end(), b.key);
    });
    grid.algorithms.push_back(std::move(g));
  }
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    if (!parse_algorithm(name)) throw Error(ErrorKind::UnknownKey, "unknown sweep section 'sweep." + name + "'");
  }
  return grid;
}

void apply_yaml(AppConfig& c, const YAML::Node& node, const std::string& prefix) {
  for (const auto& kv : node) {
    const std::string key = prefix + kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    if (key == "sweep") {
      c.sweep_grid = parse_sweep(value, c.notices);
    } else if (is_list_key(key)) {
      apply_list(c, key, scalar_list(key, value));
    } else if (is_scalar_key(key)) {
      if (!value.IsScalar()) throw Error(ErrorKind::TypeMismatch, key + " must be a scalar");
      apply_scalar(c, key, value.Scalar());
    } else if (value.IsMap() && (key == "a1" || key == "a2" || key == "dbscan" || key == "kmeans" || key == "columns")) {
      apply_yaml(c, value, key + ".");
    } else {
      throw Error(ErrorKind::UnknownKey, "unknown configuration key '" + key + "'");
    }
  }
}

AppConfig resolve(const YAML::Node* root, const FlagList& flags) {
  AppConfig c;
  if (root && !root->IsNull()) {
    if (!root->IsMap()) throw Error(ErrorKind::TypeMismatch, "configuration root must be a map");
    apply_yaml(c, *root, "");
  }
  bool inputs_from_flags = false;
  for (const auto& [raw_key, value] : flags) {
    const std::string key = flag_to_key(raw_key);
    if (key == "input") {
      // Repeated --input flags accumulate; the first one replaces the file's list.
      if (!inputs_from_flags) c.inputs.clear();
      inputs_from_flags = true;
      for (const auto& v : split_commas(value)) c.inputs.emplace_back(v);
    } else if (is_list_key(key)) {
      apply_list(c, key, split_commas(value));
    } else {
      apply_scalar(c, key, value);
    }
  }
  c.params.validate();
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw Error(ErrorKind::InvalidParameter, "train_fraction must be in (0, 1)");
  for (double t : c.thresholds)
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "thresholds must be positive");
  return c;
}

YAML::Node load_yaml(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::TypeMismatch, "cannot parse " + origin + ": " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& flag_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = kListKeys;
    k.insert(k.end(), kScalarKeys.begin(), kScalarKeys.end());
    const auto& p = sweep_parameter_keys();
    k.insert(k.end(), p.begin(), p.end());
    return k;
  }();
  return keys;
}

std::string key_to_flag(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '.', '-');
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

std::string flag_to_key(const std::string& flag) {
  std::string f = flag;
  while (!f.empty() && f.front() == '-') f.erase(0, 1);
  for (const auto& k : flag_keys())
    if (key_to_flag(k) == f || k == f) return k;
  throw Error(ErrorKind::UnknownKey, "unknown option '--" + f + "'");
}

AppConfig resolve_config(const std::optional<std::filesystem::path>& file, const FlagList& flags) {
  if (!file) return resolve(nullptr, flags);
  std::ifstream in(*file);
  if (!in) throw Error(ErrorKind::FileNotFound, "config file not found: " + file->string());
  std::stringstream ss;
  ss << in.rdbuf();
  const YAML::Node root = load_yaml(ss.str(), file->string());
  return resolve(&root, flags);
}

AppConfig resolve_config_text(const std::string& yaml, const FlagList& flags) {
  const YAML::Node root = load_yaml(yaml, "configuration text");
  return resolve(&root, flags);
}

std::string profile_yaml(Algorithm algo, const DetectionParams& p) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "algorithm: " << to_string(algo) << "\n";
  out << "grid_size: " << num(p.grid_size) << "\n";
  out << "night_start_hour: " << p.night_start_hour << "\n";
  out << "night_end_hour: " << p.night_end_hour << "\n";
  out << "weekend_start_hour: " << p.weekend_start_hour << "\n";
  out << "weekend_end_hour: " << p.weekend_end_hour << "\n";
  out << "weekend_days: [";
  bool first = true;
  for (std::size_t d = 0; d < 7; ++d) {
    if (!p.weekend_days.test(d)) continue;
    out << (first ? "" : ", ") << d;
    first = false;
  }
  out << "]\n";
  out << "a1:\n  bandwidth_m: " << num(p.a1.bandwidth_m) << "\n";
  out << "a2:\n  stay_dist_m: " << num(p.a2.stay_dist_m) << "\n  stay_time_min: " << num(p.a2.stay_time_min)
      << "\n  region_radius_m: " << num(p.a2.region_radius_m) << "\n";
  out << "dbscan:\n  eps_m: " << num(p.dbscan.eps_m) << "\n  min_pts: " << p.dbscan.min_pts << "\n";
  out << "kmeans:\n  k: " << p.kmeans.k << "\n  random_state: " << p.kmeans.random_state
      << "\n  n_init: " << p.kmeans.n_init << "\n";
  return out.str();
}

}  // namespace ghost
