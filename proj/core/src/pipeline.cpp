#include "geoloc/pipeline.hpp"

#include <algorithm>

#include "geoloc/error.hpp"

namespace geoloc {

PlaneFrame plane_frame_for(const Topology& t, const LandmarkSet& landmarks) {
  if (landmarks.members.empty()) return PlaneFrame(0.0);
  double lat = 0.0;
  for (const auto& id : landmarks.members) lat += t.node(t.index_of(id)).position.lat;
  return PlaneFrame(lat / static_cast<double>(landmarks.k()));
}

CurveFit fit_landmark_curves(const LandmarkSet& landmarks, std::span<const TrainingPair> training) {
  CurveFit out;
  for (const auto& id : landmarks.members) {
    std::vector<TrainingPair> own;
    for (const auto& pair : training) {
      if (pair.from == id) own.push_back(pair);
    }
    try {
      out.curves.push_back(fit_curve(own, id));
    } catch (const Error& e) {
      out.skipped.push_back({id, e.what()});
    }
  }
  return out;
}

LcFactor calibrate_uniform_lc(const Topology& t, std::span<const LatencyDistanceCurve> curves,
                              std::span<const TrainingPair> training, const PlaneFrame& frame) {
  std::vector<double> predicted, reference;
  for (const auto& pair : training) {
    const auto it = std::find_if(curves.begin(), curves.end(),
                                 [&](const auto& c) { return c.landmark_id == pair.from; });
    if (it == curves.end()) continue;
    const auto a = frame.to_plane(t.node(t.index_of(pair.from)).position);
    const auto b = frame.to_plane(t.node(t.index_of(pair.to)).position);
    predicted.push_back(latency_to_distance(*it, LcFactor{}, pair.latency_ms).km());
    reference.push_back(PlaneFrame::degrees_to_km(planar_distance(a, b)));
  }
  return fit_uniform_lc(predicted, reference);
}

const LatencyDistanceCurve* GeolocationModel::curve_for(const NodeId& landmark) const {
  const auto it = std::find_if(curves.begin(), curves.end(),
                               [&](const auto& c) { return c.landmark_id == landmark; });
  return it == curves.end() ? nullptr : &*it;
}

std::vector<LaterationCircle> circles_for(const Topology& t, const GeolocationModel& model,
                                          std::span<const Measurement> measurements) {
  std::vector<LaterationCircle> circles;
  circles.reserve(measurements.size());
  for (const auto& m : measurements) {
    const auto* curve = model.curve_for(m.landmark_id);
    if (curve == nullptr) continue;
    const auto sel = select_measurement(m);
    const auto latency = corrected_latency(sel.rtt_min_ms, sel.hop_count);
    const auto km = latency_to_distance(*curve, model.lc, latency.ms);
    circles.push_back(
        make_circle(m.landmark_id, t.node(t.index_of(m.landmark_id)).position, km, model.frame));
  }
  return circles;
}

Estimate locate(const Topology& t, const GeolocationModel& model,
                std::span<const Measurement> measurements, const LocalizeConfig& config) {
  const auto circles = circles_for(t, model, measurements);
  return localize(circles, model.frame, static_cast<int>(circles.size()), config);
}

}  // namespace geoloc
