#pragma once

#include <span>
#include <utility>
#include <vector>

#include "geoloc/geo.hpp"
#include "geoloc/lateration.hpp"

namespace geoloc {

// Relative tolerance under which a distance counts as equal to the median.
inline constexpr double kMedianTieTolerance = 1e-9;

// Sum of all pairwise great-circle distances (km) strictly below their
// median. Throws Error(TooFewPoints) for fewer than two points.
double cohesion(const PointCloud& cloud);
double cohesion(std::span<const GeoPoint> points);

struct TuningStep {
  int shrink_step = 0;
  double cohesion_km = 0.0;
};

struct TuningTrace {
  // Step 0 (untouched radii) followed by every accepted shrink step.
  std::vector<TuningStep> iterations;
  int accepted_steps = 0;
  double final_scale = 1.0;  // shrink_factor ^ accepted_steps
  bool hit_cap = false;
};

struct TuneOptions {
  double shrink_factor = 0.99;
  int max_iterations = 200;
  CloudOptions cloud;
};

struct TunedCircles {
  std::vector<LaterationCircle> circles;
  TuningTrace trace;
};

// Shrinks all radii by 1% per step while the point-cloud cohesion strictly
// decreases; the first non-improving step is reverted. Throws
// Error(TooFewCircles).
TunedCircles self_tune(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                       const TuneOptions& options = {});

struct EstimatePoint {
  GeoPoint position;
  std::pair<NodeId, NodeId> origin;
};

struct Estimate {
  GeoPoint location;
  KmDistance error_radius_km;
  std::vector<std::size_t> cloud_history;  // cloud size before each round and at the end
  TuningTrace tuning;
  std::vector<EstimatePoint> retained;
  std::vector<EstimatePoint> removed;  // in removal order
  PointCloud cloud;                    // cloud the filter started from
};

// Repeatedly centers the cloud with free_place_center and drops the point
// farthest from the center until fewer than n_landmarks points remain.
// Throws Error(EmptyCloud).
Estimate filter_and_estimate(const PointCloud& cloud, int n_landmarks, double e_min);

struct LocalizeConfig {
  double eps = kDefaultTangencyEps;
  double e_min = 0.001;
  int shrink_cap = 200;
  bool self_tune = true;
  ContainedPolicy contained = ContainedPolicy::Adjust;
};

// self_tune -> build_point_cloud -> filter_and_estimate.
Estimate localize(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                  int n_landmarks, const LocalizeConfig& config = {});

}  // namespace geoloc
