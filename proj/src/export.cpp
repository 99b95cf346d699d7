#include "ghost/export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ghost/ingest.hpp"

namespace ghost {

namespace {

const char* const kResultsHeader =
    "user_id,home_lat,home_lon,inference_source,refinement_method,stay_time_s,unique_nights,total_points,algorithm";

std::vector<const HomeEstimate*> sorted_by_user(std::span<const HomeEstimate> estimates) {
  std::vector<const HomeEstimate*> v;
  for (const auto& e : estimates) v.push_back(&e);
  std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->user_id < b->user_id; });
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

[[noreturn]] void malformed(std::size_t row, const std::string& why) {
  throw Error(ErrorKind::MalformedResults, "results row " + std::to_string(row) + ": " + why);
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string results_csv(std::span<const HomeEstimate> estimates) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  char buf[128];
  for (const auto* e : sorted_by_user(estimates)) {
    out << csv_field(e->user_id) << ',';
    if (e->detected() && e->home_lat && e->home_lon) {
      std::snprintf(buf, sizeof buf, "%.7f,%.7f", *e->home_lat, *e->home_lon);
      out << buf;
    } else {
      out << ',';
    }
    out << ',' << to_string(e->inference_source) << ',' << to_string(e->refinement_method) << ',';
    if (e->winning_cell) {
      std::snprintf(buf, sizeof buf, "%.3f,%zu,%zu", e->winning_cell->stay_time_s, e->winning_cell->unique_nights,
                    e->winning_cell->total_points);
      out << buf;
    } else {
      out << ",,";
    }
    out << ',' << to_string(e->algorithm) << '\n';
  }
  return out.str();
}

void write_results_csv(const std::filesystem::path& path, std::span<const HomeEstimate> estimates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
  out << results_csv(estimates);
}

std::vector<HomeEstimate> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, "results file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kResultsHeader))
    throw Error(ErrorKind::MalformedResults, "results file has an unexpected header: " + path.string());

  std::vector<HomeEstimate> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) malformed(row, "expected 9 columns");
    HomeEstimate e;
    e.user_id = f[0];
    auto src = parse_inference_source(f[3]);
    auto method = parse_refinement_method(f[4]);
    auto algo = parse_algorithm(f[8]);
    if (!src || !method || !algo) malformed(row, "unknown enum value");
    e.inference_source = *src;
    e.refinement_method = *method;
    e.algorithm = *algo;
    if (e.inference_source != InferenceSource::None) {
      auto lat = parse_double(f[1]);
      auto lon = parse_double(f[2]);
      if (!lat || !lon || !valid_latitude(*lat) || !valid_longitude(*lon)) malformed(row, "bad coordinates");
      e.home_lat = lat;
      e.home_lon = lon;
    } else if (!f[1].empty() || !f[2].empty()) {
      malformed(row, "coordinates present for an undetected user");
    }
    if (!f[5].empty()) {
      auto stay = parse_double(f[5]);
      auto nights = parse_double(f[6]);
      auto total = parse_double(f[7]);
      if (!stay || !nights || !total) malformed(row, "bad cell statistics");
      CellStats c;
      c.stay_time_s = *stay;
      c.unique_nights = static_cast<std::size_t>(*nights);
      c.total_points = static_cast<std::size_t>(*total);
      e.winning_cell = c;
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string homes_geojson(std::span<const HomeEstimate> estimates, std::span<const UserTrajectory> traces) {
  using nlohmann::ordered_json;
  ordered_json features = ordered_json::array();
  for (const auto* e : sorted_by_user(estimates)) {
    if (!e->detected() || !e->home_lat || !e->home_lon) continue;
    ordered_json props;
    props["user_id"] = e->user_id;
    props["home_lat"] = *e->home_lat;
    props["home_lon"] = *e->home_lon;
    props["inference_source"] = to_string(e->inference_source);
    props["refinement_method"] = to_string(e->refinement_method);
    if (e->winning_cell) {
      props["stay_time_s"] = e->winning_cell->stay_time_s;
      props["unique_nights"] = e->winning_cell->unique_nights;
      props["total_points"] = e->winning_cell->total_points;
    } else {
      props["stay_time_s"] = nullptr;
      props["unique_nights"] = nullptr;
      props["total_points"] = nullptr;
    }
    props["algorithm"] = to_string(e->algorithm);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {*e->home_lon, *e->home_lat}}}},
                        {"properties", props}});
  }
  for (const auto& t : traces) {
    if (t.points.size() < 2) continue;
    ordered_json coords = ordered_json::array();
    for (const auto& p : t.points) coords.push_back({p.lon, p.lat});
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                        {"properties", {{"user_id", t.user_id}, {"kind", "trace"}}}});
  }
  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = features;
  return fc.dump(2) + "\n";
}

std::string map_html(const std::string& geojson, std::span<const HomeEstimate> estimates) {
  std::vector<std::string> omitted;
  for (const auto* e : sorted_by_user(estimates))
    if (!e->detected()) omitted.push_back(e->user_id);

  std::string safe = geojson;
  // Keep "</script>" inside string values from closing the embedding tag.
  for (std::size_t pos = 0; (pos = safe.find("</", pos)) != std::string::npos; pos += 3) safe.replace(pos, 2, "<\\/");

  std::ostringstream legend;
  legend << "<b>Homes</b><br>\n"
         << "<span style=\"color:#c00\">&#9679;</span> night-inferred<br>\n"
         << "<span style=\"color:#06c\">&#9679;</span> weekend-inferred<br>\n";
  if (omitted.empty()) {
    legend << "All users have an estimate.\n";
  } else {
    legend << "No estimate (omitted): ";
    for (std::size_t i = 0; i < omitted.size(); ++i) legend << (i ? ", " : "") << html_escape(omitted[i]);
    legend << "\n";
  }

  std::ostringstream out;
  out << R"(<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>Inferred home locations</title>
<link rel="stylesheet" href="https://unpkg.com/leaflet@1.9.4/dist/leaflet.css">
<script src="https://unpkg.com/leaflet@1.9.4/dist/leaflet.js"></script>
<style>
  html, body { height: 100%; margin: 0; }
  #map { height: 100%; }
  .legend { background: white; padding: 6px 10px; font: 13px sans-serif; }
</style>
</head>
<body>
<div id="map"></div>
<template id="legend-text">
)" << legend.str() << R"(</template>
<script id="homes" type="application/geo+json">
)" << safe << R"(</script>
<script>
  const data = JSON.parse(document.getElementById('homes').textContent);
  const map = L.map('map');
  L.tileLayer('https://{s}.tile.openstreetmap.org/{z}/{x}/{y}.png', {
    maxZoom: 19, attribution: '&copy; OpenStreetMap contributors'
  }).addTo(map);
  const layer = L.geoJSON(data, {
    style: f => ({ color: f.properties.kind === 'trace' ? '#888' : '#c00', weight: 1 }),
    pointToLayer: (f, ll) => L.circleMarker(ll, {
      radius: 6, color: f.properties.inference_source === 'weekend' ? '#06c' : '#c00'
    }),
    onEachFeature: (f, l) => {
      if (f.properties.kind !== 'trace')
        l.bindPopup(`${f.properties.user_id}<br>${f.properties.inference_source} / ${f.properties.refinement_method}`);
    }
  }).addTo(map);
  if (layer.getLayers().length) map.fitBounds(layer.getBounds(), { padding: [20, 20] });
  else map.setView([0, 0], 2);
  const legend = L.control({ position: 'bottomright' });
  legend.onAdd = () => {
    const div = L.DomUtil.create('div', 'legend');
    div.innerHTML = document.getElementById('legend-text').innerHTML;
    return div;
  };
  legend.addTo(map);
</script>
</body>
</html>
)";
  return out.str();
}

}  // namespace ghost
