// Command-line front end: detect, validate, sweep, export-map, gen-synthetic.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ghost/batch.hpp"
#include "ghost/config.hpp"
#include "ghost/export.hpp"
#include "ghost/ingest.hpp"
#include "ghost/metrics.hpp"
#include "ghost/sweep.hpp"
#include "ghost/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ghost;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

bool is_config_error(ErrorKind k) {
  return k == ErrorKind::UnknownKey || k == ErrorKind::TypeMismatch || k == ErrorKind::InvalidParameter;
}

/// Options shared by the commands that resolve an AppConfig.
struct ConfigOptions {
  std::string config_file;
  std::map<std::string, std::vector<std::string>> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "YAML configuration file (default: $GHOST_CONFIG)");
    for (const auto& key : flag_keys()) {
      auto* opt = cmd->add_option("--" + key_to_flag(key), values[key], "overrides '" + key + "'");
      if (key == "input") opt->allow_extra_args(false);
    }
  }

  AppConfig resolve() const {
    std::optional<fs::path> file;
    if (!config_file.empty()) {
      file = config_file;
    } else if (const char* env = std::getenv("GHOST_CONFIG"); env && *env) {
      file = env;
    }
    FlagList flags;
    for (const auto& key : flag_keys()) {
      auto it = values.find(key);
      if (it == values.end()) continue;
      for (const auto& v : it->second) flags.emplace_back(key, v);
    }
    auto cfg = resolve_config(file, flags);
    for (const auto& n : cfg.notices) std::cerr << "note: " << n << "\n";
    return cfg;
  }
};

void report_ingest(const IngestSummary& s) {
  std::cerr << "ingested " << s.records_accepted << " records for " << s.users << " users from " << s.files_read
            << " files";
  if (s.records_rejected > 0) {
    std::cerr << "; rejected " << s.records_rejected << " (";
    bool first = true;
    for (const auto& [k, v] : s.rejection_breakdown) {
      std::cerr << (first ? "" : ", ") << k << ": " << v;
      first = false;
    }
    std::cerr << ")";
  }
  std::cerr << "\n";
}

std::vector<UserTrajectory> load_all(const AppConfig& cfg) {
  if (cfg.inputs.empty()) throw Error(ErrorKind::InvalidParameter, "no input given (use --input)");
  std::vector<UserTrajectory> parts;
  IngestSummary total;
  for (const auto& in : cfg.inputs) {
    auto loaded = load_input(in, cfg.columns);
    total.merge(loaded.summary);
    for (auto& t : loaded.data) parts.push_back(std::move(t));
  }
  auto users = merge_trajectories(std::move(parts));
  total.users = users.size();
  report_ingest(total);
  return users;
}

std::vector<HomeEstimate> run_detection(const AppConfig& cfg, const std::vector<UserTrajectory>& users) {
  auto batch = detect_batch_parallel(users, cfg.algorithm, cfg.params, cfg.threads);
  for (const auto& f : batch.failures) std::cerr << "warning: user " << f.user_id << ": " << f.message << "\n";
  return batch.estimates;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::FileNotFound, "cannot create output directory " + dir.string());
}

int cmd_detect(const AppConfig& cfg) {
  const auto users = load_all(cfg);
  const auto estimates = run_detection(cfg, users);
  ensure_dir(cfg.output_dir);
  const auto path = cfg.output_dir / "results.csv";
  write_results_csv(path, estimates);
  std::size_t found = 0;
  for (const auto& e : estimates) found += e.detected() ? 1 : 0;
  std::cerr << "wrote " << path.string() << " (" << found << "/" << estimates.size() << " users with a home)\n";
  return kExitOk;
}

int cmd_validate(const AppConfig& cfg) {
  if (!cfg.ground_truth) throw Error(ErrorKind::InvalidParameter, "validate needs --ground-truth");
  std::vector<HomeEstimate> estimates;
  if (cfg.results) {
    estimates = read_results_csv(*cfg.results);
  } else {
    estimates = run_detection(cfg, load_all(cfg));
  }
  const auto truth = load_ground_truth(*cfg.ground_truth);
  const auto report = score(estimates, truth, cfg.thresholds);

  ensure_dir(cfg.output_dir);
  write_report_csv(cfg.output_dir / "validation_records.csv", report);
  const auto summary = report_summary_json(report);
  write_text(cfg.output_dir / "validation_summary.json", summary);
  std::cout << summary;
  return kExitOk;
}

int cmd_sweep(const AppConfig& cfg) {
  if (!cfg.ground_truth) throw Error(ErrorKind::InvalidParameter, "sweep needs --ground-truth");
  const auto users = load_all(cfg);
  const auto truth = load_ground_truth(*cfg.ground_truth);

  std::vector<std::string> ids;
  for (const auto& u : users) ids.push_back(u.user_id);
  const auto split = split_users(ids, cfg.train_fraction, cfg.seed);
  const auto train = select_users(users, split.train);
  const auto test = select_users(users, split.test);

  ParamGrid grid;
  if (cfg.sweep_grid) {
    grid = *cfg.sweep_grid;
  } else {
    std::cerr << "note: no sweep section configured; using the built-in sensitivity ranges\n";
    grid = ParamGrid::sensitivity_ranges();
  }
  std::cerr << "sweeping " << grid.combinations() << " combinations over " << train.size() << " training users\n";
  const auto result = run_sweep(train, truth, grid, cfg.params, cfg.threads);

  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir / "sweep_results.csv", sweep_csv(result));

  std::map<Algorithm, DetectionParams> best;
  for (const auto& [algo, idx] : result.best_row) {
    best.emplace(algo, result.rows[idx].resolved);
    write_text(cfg.output_dir / ("best_" + std::string(to_string(algo)) + ".yaml"),
               profile_yaml(algo, result.rows[idx].resolved));
  }
  for (const auto& g : grid.algorithms)
    if (!result.best_row.count(g.algorithm))
      std::cerr << "note: no evaluable combination for " << to_string(g.algorithm) << "\n";

  nlohmann::ordered_json summary;
  summary["seed"] = cfg.seed;
  summary["train_users"] = split.train;
  summary["test_users"] = split.test;
  auto& algos = summary["test_reports"] = nlohmann::ordered_json::object();
  for (const auto& [algo, params] : best) {
    auto batch = detect_batch_parallel(test, algo, params, cfg.threads);
    try {
      const auto report = score(batch.estimates, truth, cfg.thresholds);
      algos[std::string(to_string(algo))] = nlohmann::ordered_json::parse(report_summary_json(report));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoEvaluableUsers) throw;
      algos[std::string(to_string(algo))] = nullptr;
    }
  }
  write_text(cfg.output_dir / "sweep_test_summary.json", summary.dump(2) + "\n");
  std::cerr << "wrote " << (cfg.output_dir / "sweep_results.csv").string() << "\n";
  return kExitOk;
}

int cmd_export_map(const AppConfig& cfg) {
  if (!cfg.results) throw Error(ErrorKind::InvalidParameter, "export-map needs --results");
  const auto estimates = read_results_csv(*cfg.results);
  std::vector<UserTrajectory> traces;
  if (!cfg.inputs.empty()) traces = load_all(cfg);
  const auto geojson = homes_geojson(estimates, traces);
  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir / "homes.geojson", geojson);
  write_text(cfg.output_dir / "map.html", map_html(geojson, estimates));
  std::cerr << "wrote " << (cfg.output_dir / "homes.geojson").string() << " and map.html\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Home-location inference from GPS trajectories"};
  app.require_subcommand(1);

  ConfigOptions detect_opts, validate_opts, sweep_opts, export_opts;
  auto* detect = app.add_subcommand("detect", "Infer one home per user and write results.csv");
  detect_opts.attach(detect);
  auto* validate = app.add_subcommand("validate", "Score estimates against ground truth");
  validate_opts.attach(validate);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep on a seeded training split");
  sweep_opts.attach(sweep);
  auto* export_map = app.add_subcommand("export-map", "Write homes.geojson and map.html from results");
  export_opts.attach(export_map);

  SynthSpec synth;
  std::string synth_out = ".";
  bool no_night = false;
  auto* gen = app.add_subcommand("gen-synthetic", "Generate trajectories with planted homes");
  gen->add_option("--users", synth.n_users, "number of users")->check(CLI::NonNegativeNumber);
  gen->add_option("--days", synth.days, "simulated days")->check(CLI::NonNegativeNumber);
  gen->add_option("--sigma", synth.sigma_m, "jitter standard deviation (m)");
  gen->add_option("--work-offset", synth.work_offset_m, "home-to-work distance (m)");
  gen->add_option("--night-rate", synth.night_rate, "pings per night hour");
  gen->add_option("--day-rate", synth.day_rate, "pings per daytime hour");
  gen->add_option("--dropout", synth.dropout, "per-ping drop probability");
  gen->add_option("--seed", synth.seed, "generator seed");
  gen->add_flag("--no-night", no_night, "emit no night pings (exercises the weekend fallback)");
  bool weekend_at_work = false;
  gen->add_flag("--weekend-at-work", weekend_at_work, "weekend daytime behaves like weekdays (pings at work)");
  gen->add_option("--output-dir", synth_out, "directory for points.csv and truth.csv");

  app.footer(
      "Hour windows are half-open [start, end); start == end selects all 24 hours.\n"
      "Every configuration key can be passed as --kebab-case (e.g. --dbscan-eps-m 20).");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  // Configuration problems map to exit 1; everything after config resolution is data.
  std::optional<AppConfig> cfg;
  try {
    if (*detect) cfg = detect_opts.resolve();
    if (*validate) cfg = validate_opts.resolve();
    if (*sweep) cfg = sweep_opts.resolve();
    if (*export_map) cfg = export_opts.resolve();
    if (cfg && cfg->threads > 0) set_default_thread_count(cfg->threads);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*detect) return cmd_detect(*cfg);
    if (*validate) return cmd_validate(*cfg);
    if (*sweep) return cmd_sweep(*cfg);
    if (*export_map) return cmd_export_map(*cfg);
    if (*gen) {
      if (no_night) synth.night_rate = 0.0;
      if (weekend_at_work) synth.weekend_at_home = false;
      const auto data = generate(synth);
      ensure_dir(synth_out);
      write_points_csv(fs::path(synth_out) / "points.csv", data.users);
      write_ground_truth(fs::path(synth_out) / "truth.csv", data.truth);
      std::cerr << "wrote " << data.pings_kept << " points for " << data.users.size() << " users to " << synth_out
                << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
