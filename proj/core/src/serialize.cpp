#include "geoloc/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "geoloc/error.hpp"

namespace geoloc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

template <typename Fn>
auto parse_guard(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

ordered_json score_json(const PlacementScore& s) {
  return ordered_json{{"max_dist", s.max_dist}, {"mean_dist", s.mean_dist}};
}

ordered_json landmark_array(const Topology& t, const LandmarkSet& set) {
  auto arr = ordered_json::array();
  for (const auto& id : set.members) {
    const auto& p = t.node(t.index_of(id)).position;
    arr.push_back(ordered_json{{"id", id}, {"lat", p.lat}, {"lon", p.lon}});
  }
  return arr;
}

ordered_json point_feature(const GeoPoint& p, ordered_json properties) {
  return ordered_json{{"type", "Feature"},
                      {"geometry", {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}}},
                      {"properties", std::move(properties)}};
}

// Point at `km` from `origin` along initial bearing `bearing_rad`.
GeoPoint destination(const GeoPoint& origin, double km, double bearing_rad) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double delta = km / kEarthRadiusKm;
  const double lat1 = origin.lat * kRad;
  const double lon1 = origin.lon * kRad;
  const double lat2 = std::asin(std::sin(lat1) * std::cos(delta) +
                                std::cos(lat1) * std::sin(delta) * std::cos(bearing_rad));
  const double lon2 = lon1 + std::atan2(std::sin(bearing_rad) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  return {lat2 / kRad, normalize_lon(lon2 / kRad)};
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    std::ostringstream os;
    os << "line " << line << ": not a number '" << s << "'";
    throw Error(ErrorCode::ParseError, os.str());
  }
  return v;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string topology_to_json(const Topology& t) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const auto& n : t.nodes()) {
    ordered_json node{{"id", n.id}, {"lat", n.position.lat}, {"lon", n.position.lon}};
    if (!n.label.empty()) node["label"] = n.label;
    doc["nodes"].push_back(std::move(node));
  }
  doc["edges"] = ordered_json::array();
  for (const auto& [a, b] : t.edges()) doc["edges"].push_back({t.node(a).id, t.node(b).id});
  return doc.dump(2) + "\n";
}

std::string landmarks_to_json(const Topology& t, const PlacementReport& report) {
  ordered_json doc;
  doc["landmarks"] = landmark_array(t, report.landmarks);
  doc["score"] = score_json(report.score);
  if (report.baseline && report.baseline_score) {
    doc["baseline"] = ordered_json{{"method", "2-approx"},
                                   {"landmarks", landmark_array(t, *report.baseline)},
                                   {"score", score_json(*report.baseline_score)}};
  }
  return doc.dump(2) + "\n";
}

LandmarkSet landmarks_from_json(std::string_view text) {
  return parse_guard("landmark file", [&] {
    const auto doc = json::parse(text);
    LandmarkSet set;
    for (const auto& lm : doc.at("landmarks")) set.members.push_back(lm.at("id").get<std::string>());
    return set;
  });
}

std::string curve_to_json(const LatencyDistanceCurve& curve, LcFactor lc) {
  const ordered_json doc{{"landmark_id", curve.landmark_id},
                         {"p", curve.p},
                         {"q", curve.q},
                         {"n", curve.n},
                         {"m", curve.m},
                         {"lc", lc.value()},
                         {"residual", curve.residual}};
  return doc.dump(2) + "\n";
}

std::pair<LatencyDistanceCurve, LcFactor> curve_from_json(std::string_view text) {
  const auto [curve, lc] = parse_guard("curve file", [&] {
    const auto doc = json::parse(text);
    LatencyDistanceCurve c;
    c.landmark_id = doc.at("landmark_id").get<std::string>();
    c.p = doc.at("p").get<double>();
    c.q = doc.at("q").get<double>();
    c.n = doc.at("n").get<double>();
    c.m = doc.at("m").get<double>();
    c.residual = doc.value("residual", 0.0);
    return std::make_pair(c, doc.value("lc", 1.0));
  });
  return {curve, LcFactor(lc)};
}

std::string measurement_to_json_line(const Measurement& m) {
  ordered_json hops = ordered_json::object();
  for (const auto& [proto, trace] : m.hops_by_protocol) hops[proto] = trace;
  const ordered_json doc{{"landmark_id", m.landmark_id},
                         {"target_id", m.target_id},
                         {"rtt_samples", m.rtt_samples},
                         {"hops_by_protocol", hops},
                         {"timestamp", m.timestamp_ms}};
  return doc.dump();
}

std::string measurements_to_jsonl(const std::vector<Measurement>& ms) {
  std::string out;
  for (const auto& m : ms) out += measurement_to_json_line(m) + "\n";
  return out;
}

std::vector<Measurement> measurements_from_jsonl(std::string_view text) {
  std::vector<Measurement> out;
  std::size_t line_no = 0;
  for (const auto line : split(text, '\n')) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::ostringstream where;
    where << "measurement line " << line_no;
    out.push_back(parse_guard(where.str(), [&] {
      const auto doc = json::parse(line);
      Measurement m;
      m.landmark_id = doc.at("landmark_id").get<std::string>();
      m.target_id = doc.at("target_id").get<std::string>();
      m.rtt_samples = doc.at("rtt_samples").get<std::vector<double>>();
      for (const auto& [proto, trace] : doc.at("hops_by_protocol").items()) {
        m.hops_by_protocol[proto] = trace.get<std::vector<int>>();
      }
      m.timestamp_ms = doc.value("timestamp", std::int64_t{0});
      return m;
    }));
  }
  return out;
}

std::string training_to_csv(const std::vector<TrainingPair>& pairs) {
  std::string out = "latency_ms,distance_km,lm_a,lm_b\n";
  for (const auto& p : pairs) {
    out += format_double(p.latency_ms) + "," + format_double(p.distance_km) + "," + p.from + "," +
           p.to + "\n";
  }
  return out;
}

std::vector<TrainingPair> training_from_csv(std::string_view text) {
  std::vector<TrainingPair> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("latency_ms")) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      std::ostringstream os;
      os << "training CSV line " << line_no << ": expected 4 fields";
      throw Error(ErrorCode::ParseError, os.str());
    }
    out.push_back({parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                   std::string(fields[2]), std::string(fields[3])});
  }
  return out;
}

std::string cloud_to_geojson(const PointCloud& cloud) {
  ordered_json features = ordered_json::array();
  for (const auto& p : cloud.points) {
    features.push_back(point_feature(
        cloud.frame.to_geo(p.point),
        {{"landmark_a", p.origin.first}, {"landmark_b", p.origin.second}, {"case", to_string(p.kind)}}));
  }
  const ordered_json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

std::string estimate_to_geojson(const Estimate& est) {
  ordered_json features = ordered_json::array();
  features.push_back(point_feature(
      est.location, {{"layer", "estimate"}, {"error_km", est.error_radius_km.km()}}));

  constexpr int kSegments = 64;
  ordered_json ring = ordered_json::array();
  for (int i = 0; i <= kSegments; ++i) {
    // Counter-clockwise: bearings run from north through west.
    const double bearing = -2.0 * std::numbers::pi * (i % kSegments) / kSegments;
    const auto p = destination(est.location, est.error_radius_km.km(), bearing);
    ring.push_back({p.lon, p.lat});
  }
  features.push_back(ordered_json{
      {"type", "Feature"},
      {"geometry", {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}}},
      {"properties", {{"layer", "error_circle"}, {"radius_km", est.error_radius_km.km()}}}});

  for (const auto& p : est.retained) {
    features.push_back(point_feature(p.position, {{"layer", "retained"},
                                                  {"landmark_a", p.origin.first},
                                                  {"landmark_b", p.origin.second}}));
  }
  for (std::size_t i = 0; i < est.removed.size(); ++i) {
    const auto& p = est.removed[i];
    features.push_back(point_feature(p.position, {{"layer", "removed"},
                                                  {"round", i + 1},
                                                  {"landmark_a", p.origin.first},
                                                  {"landmark_b", p.origin.second}}));
  }
  const ordered_json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

std::string estimate_summary_json(const Estimate& est, std::string_view target_id) {
  ordered_json trace = ordered_json::array();
  for (const auto& step : est.tuning.iterations) {
    trace.push_back({{"shrink_step", step.shrink_step}, {"cohesion_km", step.cohesion_km}});
  }
  ordered_json doc;
  if (!target_id.empty()) doc["target_id"] = std::string(target_id);
  doc["lat"] = est.location.lat;
  doc["lon"] = est.location.lon;
  doc["error_km"] = est.error_radius_km.km();
  doc["tuning_steps"] = est.tuning.accepted_steps;
  doc["cloud_sizes"] = est.cloud_history;
  doc["tuning"] = {{"final_scale", est.tuning.final_scale},
                   {"hit_cap", est.tuning.hit_cap},
                   {"iterations", std::move(trace)}};
  doc["skipped_pairs"] = est.cloud.skipped_pairs;
  doc["dropped_pairs"] = est.cloud.dropped_pairs;
  return doc.dump(2) + "\n";
}

}  // namespace geoloc
