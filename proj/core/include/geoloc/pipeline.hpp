#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoloc/distcurve.hpp"
#include "geoloc/estimator.hpp"
#include "geoloc/lateration.hpp"
#include "geoloc/placement.hpp"
#include "geoloc/simnet.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

// Plane frame centred on the mean landmark latitude.
PlaneFrame plane_frame_for(const Topology& t, const LandmarkSet& landmarks);

struct SkippedLandmark {
  NodeId id;
  std::string reason;
};

struct CurveFit {
  std::vector<LatencyDistanceCurve> curves;  // landmark order
  std::vector<SkippedLandmark> skipped;
};

// Fits one curve per landmark from the training pairs it originated. Fit
// failures are reported per landmark instead of aborting the others.
CurveFit fit_landmark_curves(const LandmarkSet& landmarks, std::span<const TrainingPair> training);

// Uniform LC factor mapping each curve's predictions for its training pairs
// onto the lateration-plane distance between the two landmarks.
LcFactor calibrate_uniform_lc(const Topology& t, std::span<const LatencyDistanceCurve> curves,
                              std::span<const TrainingPair> training, const PlaneFrame& frame);

// Everything needed to turn measurements into circles.
struct GeolocationModel {
  LandmarkSet landmarks;
  std::vector<LatencyDistanceCurve> curves;
  LcFactor lc;
  PlaneFrame frame{0.0};

  const LatencyDistanceCurve* curve_for(const NodeId& landmark) const;
};

// One circle per measurement whose landmark has a curve.
std::vector<LaterationCircle> circles_for(const Topology& t, const GeolocationModel& model,
                                          std::span<const Measurement> measurements);

Estimate locate(const Topology& t, const GeolocationModel& model,
                std::span<const Measurement> measurements, const LocalizeConfig& config);

}  // namespace geoloc
