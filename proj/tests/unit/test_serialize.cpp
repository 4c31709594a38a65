#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "geoloc/error.hpp"
#include "geoloc/serialize.hpp"

using namespace geoloc;
using nlohmann::json;

namespace {

Topology small() {
  std::vector<Node> nodes{{"a", {0, 0}, "Alpha"}, {"b", {0, 1}, ""}, {"c", {1, 0}, ""}};
  return Topology(nodes, {{"a", "b"}, {"b", "c"}});
}

}  // namespace

TEST(Serialize, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> v(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = v(rng);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Serialize, TopologyJsonReloads) {
  const auto t = small();
  EXPECT_EQ(parse_topology_json(topology_to_json(t)), t);
}

TEST(Serialize, LandmarksWithBaseline) {
  const auto t = small();
  PlacementReport report{LandmarkSet{{"b"}}, placement_score(t, LandmarkSet{{"b"}}), LandmarkSet{{"a"}},
                         placement_score(t, LandmarkSet{{"a"}})};
  const auto text = landmarks_to_json(t, report);
  const auto doc = json::parse(text);
  EXPECT_EQ(doc["landmarks"][0]["id"], "b");
  EXPECT_EQ(doc["landmarks"][0]["lon"], 1.0);
  EXPECT_EQ(doc["score"]["max_dist"], 1);
  EXPECT_EQ(doc["baseline"]["method"], "2-approx");
  EXPECT_EQ(doc["baseline"]["score"]["max_dist"], 2);
  EXPECT_EQ(landmarks_from_json(text), report.landmarks);
  EXPECT_THROW(landmarks_from_json("{\"nothing\":1}"), Error);
}

TEST(Serialize, CurveRoundTrip) {
  const LatencyDistanceCurve curve{"lm", 812.25, 0.4375, 1.0, -3.5, 0.125};
  const auto [back, lc] = curve_from_json(curve_to_json(curve, LcFactor(0.85)));
  EXPECT_EQ(back.landmark_id, "lm");
  EXPECT_EQ(back.p, curve.p);
  EXPECT_EQ(back.q, curve.q);
  EXPECT_EQ(back.n, curve.n);
  EXPECT_EQ(back.m, curve.m);
  EXPECT_EQ(back.residual, curve.residual);
  EXPECT_EQ(lc.value(), 0.85);
  try {
    curve_from_json(R"({"landmark_id":"x","p":1,"q":1,"n":1,"m":0,"lc":7})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  }
}

TEST(Serialize, MeasurementsRoundTrip) {
  const std::vector<Measurement> ms{
      {"a", "t1", {4.5, 4.25, 5.0}, {{"icmp", {3, 3}}, {"udp", {2}}}, 1700000000000},
      {"b", "t1", {0.1}, {{"tcp", {0}}}, 0},
  };
  const auto text = measurements_to_jsonl(ms);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  const auto line = json::parse(measurement_to_json_line(ms[0]));
  for (const char* key : {"landmark_id", "target_id", "rtt_samples", "hops_by_protocol", "timestamp"}) {
    EXPECT_TRUE(line.contains(key)) << key;
  }
  EXPECT_EQ(measurements_from_jsonl(text + "\n\n"), ms);
}

TEST(Serialize, MeasurementParseErrorNamesLine) {
  const std::string text = measurement_to_json_line({"a", "t", {1.0}, {{"icmp", {1}}}, 0}) + "\n{\"landmark_id\":3}\n";
  try {
    measurements_from_jsonl(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Serialize, TrainingCsvRoundTrip) {
  const std::vector<TrainingPair> pairs{{1.25, 300.5, "a", "b"}, {0.1 + 0.2, 1e-3, "b", "a"}};
  const auto text = training_to_csv(pairs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "latency_ms,distance_km,lm_a,lm_b");
  EXPECT_EQ(training_from_csv(text), pairs);
  EXPECT_THROW(training_from_csv("latency_ms,distance_km,lm_a,lm_b\n1,2,a\n"), Error);
  EXPECT_THROW(training_from_csv("1,abc,a,b\n"), Error);
}

TEST(Serialize, CloudGeoJson) {
  const std::vector<LaterationCircle> circles{{"a", {0, 0}, 1.0, KmDistance(113.325)},
                                              {"b", {1.5, 0}, 1.0, KmDistance(113.325)}};
  const auto cloud = build_point_cloud(circles, PlaneFrame(0.0));
  const auto doc = json::parse(cloud_to_geojson(cloud));
  EXPECT_EQ(doc["type"], "FeatureCollection");
  ASSERT_EQ(doc["features"].size(), 2u);
  const auto& f = doc["features"][0];
  EXPECT_EQ(f["geometry"]["type"], "Point");
  EXPECT_EQ(f["properties"]["landmark_a"], "a");
  EXPECT_EQ(f["properties"]["case"], "TWO_POINTS");
  // GeoJSON order is lon, lat.
  EXPECT_NEAR(f["geometry"]["coordinates"][0].get<double>(), 0.75, 1e-12);
}

TEST(Serialize, EstimateGeoJsonAndSummary) {
  const PlaneFrame frame(0.0);
  PointCloud cloud{frame, {}, 1, 0};
  for (const PlanarPoint p : {PlanarPoint{0, 0}, PlanarPoint{0.01, 0}, PlanarPoint{0, 0.01}, PlanarPoint{3, 3}}) {
    cloud.points.push_back({p, {"a", "b"}, IntersectionCase::TwoPoints});
  }
  const auto est = filter_and_estimate(cloud, 3, 0.0001);
  const auto doc = json::parse(estimate_to_geojson(est));
  const auto& features = doc["features"];
  EXPECT_EQ(features[0]["properties"]["layer"], "estimate");
  EXPECT_EQ(features[1]["geometry"]["type"], "Polygon");
  const auto& ring = features[1]["geometry"]["coordinates"][0];
  ASSERT_EQ(ring.size(), 65u);
  EXPECT_EQ(ring.front(), ring.back());
  for (const auto& corner : ring) {
    const GeoPoint p{corner[1].get<double>(), corner[0].get<double>()};
    EXPECT_NEAR(orthodromic_distance(est.location, p).km(), est.error_radius_km.km(), 1e-6);
  }
  std::size_t retained = 0, removed = 0;
  for (const auto& f : features) {
    if (f["properties"]["layer"] == "retained") ++retained;
    if (f["properties"]["layer"] == "removed") {
      ++removed;
      EXPECT_EQ(f["properties"]["round"], removed);
    }
  }
  EXPECT_EQ(retained, est.retained.size());
  EXPECT_EQ(removed, est.removed.size());

  const auto summary = json::parse(estimate_summary_json(est, "t9"));
  EXPECT_EQ(summary["target_id"], "t9");
  EXPECT_EQ(summary["cloud_sizes"], json(est.cloud_history));
  EXPECT_EQ(summary["skipped_pairs"], 1);
  EXPECT_FALSE(json::parse(estimate_summary_json(est)).contains("target_id"));
}

TEST(Serialize, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "geoloc_test_serialize" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text_file(dir / "x.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "x.txt"), "hello\n");
  try {
    read_text_file(dir / "missing.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
