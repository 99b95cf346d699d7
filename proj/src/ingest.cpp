#include "ghost/ingest.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdio>
#include <fstream>
#include <tuple>

namespace ghost {

namespace fs = std::filesystem;

void IngestSummary::reject(ErrorKind kind) {
  ++records_rejected;
  ++rejection_breakdown[std::string(to_string(kind))];
}

void IngestSummary::merge(const IngestSummary& other) {
  files_read += other.files_read;
  records_accepted += other.records_accepted;
  records_rejected += other.records_rejected;
  for (const auto& [k, v] : other.rejection_breakdown) rejection_breakdown[k] += v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<UserTrajectory> merge_trajectories(std::vector<UserTrajectory> parts) {
  std::map<std::string, UserTrajectory> by_user;
  for (auto& part : parts) {
    auto& t = by_user[part.user_id];
    t.user_id = part.user_id;
    t.points.insert(t.points.end(), std::make_move_iterator(part.points.begin()),
                    std::make_move_iterator(part.points.end()));
  }
  std::vector<UserTrajectory> out;
  out.reserve(by_user.size());
  for (auto& [id, t] : by_user) {
    // Points of one instant keep a content order so the result does not depend on file order.
    std::stable_sort(t.points.begin(), t.points.end(), [](const GpsPoint& a, const GpsPoint& b) {
      return std::tuple(a.time.instant_us(), a.time.wall_us, a.lat, a.lon) <
             std::tuple(b.time.instant_us(), b.time.wall_us, b.lat, b.lon);
    });
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

void require_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorKind::FileNotFound, "file not found: " + path.string());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip_bom(std::string s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF && static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF)
    s.erase(0, 3);
  return s;
}

Loaded<std::vector<UserTrajectory>> parse_csv_impl(const fs::path& path, const ColumnMap& columns) {
  require_file(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());

  Loaded<std::vector<UserTrajectory>> out;
  out.summary.files_read = 1;

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MissingHeader, "empty CSV: " + path.string());
  const auto header = split_csv_line(strip_bom(line));
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto c_user = col(columns.user_id);
  const auto c_time = col(columns.timestamp);
  const auto c_lat = col(columns.latitude);
  const auto c_lon = col(columns.longitude);
  if (!c_user || !c_time || !c_lat || !c_lon)
    throw Error(ErrorKind::MissingHeader, "CSV header lacks a required column: " + path.string());

  std::map<std::string, UserTrajectory> users;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    auto field = [&](std::size_t i) -> std::optional<std::string> {
      if (i < fields.size()) return fields[i];
      return std::nullopt;
    };
    auto result = validate_point({field(*c_user), field(*c_time), field(*c_lat), field(*c_lon)});
    if (auto* rej = std::get_if<Rejection>(&result)) {
      out.summary.reject(rej->kind);
      continue;
    }
    auto& p = std::get<GpsPoint>(result);
    auto& t = users[p.user_id];
    t.user_id = p.user_id;
    t.points.push_back(std::move(p));
    ++out.summary.records_accepted;
  }

  for (auto& [id, t] : users) {
    t.sort();
    out.data.push_back(std::move(t));
  }
  out.summary.users = out.data.size();
  return out;
}

void collect_trkpts(const boost::property_tree::ptree& node, std::vector<const boost::property_tree::ptree*>& out) {
  for (const auto& [name, child] : node) {
    if (name == "trkpt")
      out.push_back(&child);
    else if (name != "<xmlattr>")
      collect_trkpts(child, out);
  }
}

std::optional<std::string> child_text(const boost::property_tree::ptree& node, const char* path) {
  if (auto v = node.get_optional<std::string>(path)) return *v;
  return std::nullopt;
}

}  // namespace

Loaded<std::vector<UserTrajectory>> parse_csv(const fs::path& path, const ColumnMap& columns) {
  auto out = parse_csv_impl(path, columns);
  if (out.data.empty()) throw Error(ErrorKind::NoValidRecords, "no valid records in " + path.string());
  return out;
}

Loaded<UserTrajectory> parse_gpx(const fs::path& path, std::optional<std::string> user_id) {
  namespace pt = boost::property_tree;
  require_file(path);
  pt::ptree tree;
  try {
    pt::read_xml(path.string(), tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::MalformedXml, std::string("malformed GPX ") + path.string() + ": " + e.what());
  }

  Loaded<UserTrajectory> out;
  out.summary.files_read = 1;
  out.data.user_id = user_id ? *user_id : path.stem().string();

  std::vector<const pt::ptree*> trkpts;
  collect_trkpts(tree, trkpts);
  for (const auto* node : trkpts) {
    RawRecord raw;
    raw.user_id = out.data.user_id;
    raw.lat = child_text(*node, "<xmlattr>.lat");
    raw.lon = child_text(*node, "<xmlattr>.lon");
    raw.timestamp = child_text(*node, "time");
    auto result = validate_point(raw);
    if (auto* rej = std::get_if<Rejection>(&result)) {
      out.summary.reject(rej->kind);
      continue;
    }
    out.data.points.push_back(std::get<GpsPoint>(std::move(result)));
    ++out.summary.records_accepted;
  }
  if (out.data.points.empty()) throw Error(ErrorKind::NoValidRecords, "no timed track points in " + path.string());
  out.data.sort();
  out.summary.users = 1;
  return out;
}

Loaded<std::vector<UserTrajectory>> load_directory(const fs::path& dir, const ColumnMap& columns) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::NotADirectory, "not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = lower(entry.path().extension().string());
    if (ext == ".gpx" || ext == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Loaded<std::vector<UserTrajectory>> out;
  std::vector<UserTrajectory> parts;
  for (const auto& f : files) {
    if (lower(f.extension().string()) == ".gpx") {
      try {
        auto g = parse_gpx(f);
        out.summary.merge(g.summary);
        parts.push_back(std::move(g.data));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoValidRecords) throw;
        ++out.summary.files_read;
      }
    } else {
      auto c = parse_csv_impl(f, columns);
      out.summary.merge(c.summary);
      for (auto& t : c.data) parts.push_back(std::move(t));
    }
  }
  out.data = merge_trajectories(std::move(parts));
  out.summary.users = out.data.size();
  if (out.data.empty()) throw Error(ErrorKind::NoValidRecords, "no valid records under " + dir.string());
  return out;
}

Loaded<std::vector<UserTrajectory>> load_input(const fs::path& path, const ColumnMap& columns) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return load_directory(path, columns);
  if (lower(path.extension().string()) == ".gpx") {
    auto g = parse_gpx(path);
    Loaded<std::vector<UserTrajectory>> out;
    out.summary = g.summary;
    out.data.push_back(std::move(g.data));
    return out;
  }
  return parse_csv(path, columns);
}

void write_points_csv(const fs::path& path, const std::vector<UserTrajectory>& users) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
  out << "user_id,timestamp,latitude,longitude\n";
  char buf[64];
  for (const auto& u : users) {
    for (const auto& p : u.points) {
      std::snprintf(buf, sizeof buf, "%.7f,%.7f", p.lat, p.lon);
      out << p.user_id << ',' << p.time.to_string() << ',' << buf << '\n';
    }
  }
}

}  // namespace ghost
