#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "geoloc/error.hpp"
#include "geoloc/pipeline.hpp"

using namespace geoloc;

namespace {

struct World {
  Topology topology;
  LandmarkSet landmarks;
  DetourProvider provider{1.2};
  std::vector<TrainingPair> training;
  GeolocationModel model;
};

World noiseless_world(int k) {
  const Region region{0, 2, 10, 12};
  World w{make_synthetic_topology(30, region, 7), {}, DetourProvider(1.2), {}, {}};
  w.landmarks = dragoon(w.topology, k).landmarks;
  w.training = generate_training_set(w.topology, w.landmarks, NoiseModel::zero(), w.provider);
  const auto fit = fit_landmark_curves(w.landmarks, w.training);
  const auto frame = plane_frame_for(w.topology, w.landmarks);
  w.model = {w.landmarks, fit.curves, calibrate_uniform_lc(w.topology, fit.curves, w.training, frame), frame};
  return w;
}

}  // namespace

TEST(Pipeline, NoiselessFitReproducesForwardModel) {
  const auto w = noiseless_world(5);
  ASSERT_EQ(w.model.curves.size(), 5u);
  for (const auto& curve : w.model.curves) {
    double lo = 1e9, hi = 0.0;
    for (const auto& pair : w.training) {
      if (pair.from != curve.landmark_id) continue;
      lo = std::min(lo, pair.latency_ms);
      hi = std::max(hi, pair.latency_ms);
    }
    // Zero noise: corrected latency is pure propagation, distance = 225 km/ms.
    for (double x = lo; x <= hi; x += (hi - lo) / 50.0) {
      EXPECT_NEAR(curve.evaluate(x) / (kSignalKmPerMs * x), 1.0, 0.01) << curve.landmark_id << " at " << x;
    }
  }
}

TEST(Pipeline, UniformLcMatchesPlaneOverRoadRatio) {
  const auto w = noiseless_world(5);
  // Road = 1.2 x great-circle; the plane uses 113.325 km per degree.
  const double expected = (113.325 / (2.0 * M_PI * kEarthRadiusKm / 360.0)) / 1.2;
  EXPECT_NEAR(w.model.lc.value(), expected, 0.01);
}

TEST(Pipeline, NoiselessLocateWithoutSelfTune) {
  auto w = noiseless_world(5);
  LocalizeConfig config;
  config.self_tune = false;
  const auto targets = random_targets(10, Region{0, 2, 10, 12}, 11);
  for (const auto& target : targets) {
    std::vector<Measurement> ms;
    for (const auto& lm : w.landmarks.members) {
      ms.push_back(simulate_measurement(w.topology, lm, target, NoiseModel::zero(), w.provider));
    }
    const auto est = locate(w.topology, w.model, ms, config);
    EXPECT_LT(orthodromic_distance(est.location, target.position).km(), 0.5) << target.id;
  }
}

TEST(Pipeline, PlaneFrameAtMeanLandmarkLatitude) {
  std::vector<Node> nodes{{"a", {10, 0}, ""}, {"b", {20, 1}, ""}, {"c", {60, 2}, ""}};
  const Topology t(nodes, {{"a", "b"}, {"b", "c"}});
  EXPECT_DOUBLE_EQ(plane_frame_for(t, LandmarkSet{{"a", "b"}}).ref_lat(), 15.0);
  EXPECT_DOUBLE_EQ(plane_frame_for(t, LandmarkSet{}).ref_lat(), 0.0);
}

TEST(Pipeline, LandmarkWithTooFewPairsIsSkipped) {
  const auto w = noiseless_world(4);
  // Only 3 pairs originate at each landmark with k = 4.
  const auto fit = fit_landmark_curves(w.landmarks, w.training);
  EXPECT_TRUE(fit.curves.empty());
  ASSERT_EQ(fit.skipped.size(), 4u);
  EXPECT_EQ(fit.skipped.front().id, w.landmarks.members.front());
}

TEST(Pipeline, CirclesOnlyForFittedLandmarks) {
  auto w = noiseless_world(5);
  const auto target = random_targets(1, Region{0, 2, 10, 12}, 3).front();
  std::vector<Measurement> ms;
  for (const auto& lm : w.landmarks.members) {
    ms.push_back(simulate_measurement(w.topology, lm, target, NoiseModel::zero(), w.provider));
  }
  w.model.curves.erase(w.model.curves.begin());
  EXPECT_EQ(circles_for(w.topology, w.model, ms).size(), 4u);
  w.model.curves.resize(1);
  try {
    locate(w.topology, w.model, ms, LocalizeConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewCircles);
  }
}
