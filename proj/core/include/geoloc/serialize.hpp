#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoloc/distcurve.hpp"
#include "geoloc/estimator.hpp"
#include "geoloc/lateration.hpp"
#include "geoloc/placement.hpp"
#include "geoloc/simnet.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories; throws Error(IoError).
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string topology_to_json(const Topology& t);

// {"landmarks":[{"id","lat","lon"}...], "score":{...}, "baseline":{...}?}
struct PlacementReport {
  LandmarkSet landmarks;
  PlacementScore score;
  std::optional<LandmarkSet> baseline;  // 2-Approx initialisation
  std::optional<PlacementScore> baseline_score;
};
std::string landmarks_to_json(const Topology& t, const PlacementReport& report);
LandmarkSet landmarks_from_json(std::string_view text);

// {landmark_id, p, q, n, m, lc, residual}
std::string curve_to_json(const LatencyDistanceCurve& curve, LcFactor lc);
std::pair<LatencyDistanceCurve, LcFactor> curve_from_json(std::string_view text);

std::string measurement_to_json_line(const Measurement& m);
std::string measurements_to_jsonl(const std::vector<Measurement>& ms);
std::vector<Measurement> measurements_from_jsonl(std::string_view text);

// Header: latency_ms,distance_km,lm_a,lm_b
std::string training_to_csv(const std::vector<TrainingPair>& pairs);
std::vector<TrainingPair> training_from_csv(std::string_view text);

// Shortest decimal form that round-trips.
std::string format_double(double v);

// RFC 7946 FeatureCollection of the cloud's points, each carrying its
// originating landmark pair.
std::string cloud_to_geojson(const PointCloud& cloud);

// Estimate point, error circle polygon and retained/removed point layers.
std::string estimate_to_geojson(const Estimate& est);
// {lat, lon, error_km, tuning_steps, cloud_sizes, ...}
std::string estimate_summary_json(const Estimate& est, std::string_view target_id = {});

}  // namespace geoloc
