#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geoloc/geo.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

// Ordered landmark node ids; the order is insertion order and drives the
// order in which refinement visits landmarks.
struct LandmarkSet {
  std::vector<NodeId> members;

  std::size_t k() const noexcept { return members.size(); }
  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

// Quality of a placement: every node is assigned to its closest landmark.
// Lower is better; max_dist is compared first, then the hop sum (equivalent
// to mean_dist for a fixed topology).
struct PlacementScore {
  int max_dist = 0;
  double mean_dist = 0.0;
  std::int64_t total_dist = 0;

  friend bool operator==(const PlacementScore& a, const PlacementScore& b) {
    return a.max_dist == b.max_dist && a.total_dist == b.total_dist;
  }
  friend bool operator<(const PlacementScore& a, const PlacementScore& b) {
    return a.max_dist != b.max_dist ? a.max_dist < b.max_dist : a.total_dist < b.total_dist;
  }
};

PlacementScore placement_score(const Topology& t, const LandmarkSet& landmarks);

// 1-center of the graph: minimum eccentricity, then smallest mean hop
// distance, then smallest id. Throws Error(DisconnectedGraph).
NodeId orientation_center(const Topology& t);

// Farthest-point (Gonzalez) initialisation seeded by the orientation center.
// Throws Error(KTooLarge) if k > |nodes|, Error(ConfigError) if k < 1,
// Error(DisconnectedGraph).
LandmarkSet init_2approx(const Topology& t, int k);

struct RefineResult {
  LandmarkSet landmarks;
  bool changed = false;
};

// One refinement pass: each landmark, in insertion order, may move once to
// the best unoccupied graph neighbor if that strictly improves the score.
RefineResult refine_step(const Topology& t, const LandmarkSet& landmarks);

struct PlacementResult {
  LandmarkSet landmarks;
  PlacementScore score;
  int refine_passes = 0;
};

PlacementResult dragoon(const Topology& t, int k);

// Exhaustive k-center optimum. Throws Error(TooLargeForBruteForce) when
// C(n, k) exceeds kBruteForceLimit.
inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;
PlacementResult brute_force_kcenter(const Topology& t, int k);

struct GridSearchOptions {
  double e0 = 0.0;      // initial grid spacing, degrees
  double e_min = 0.001; // stop once the spacing drops below this
  std::optional<GeoPoint> start;  // default: coordinate-wise mean
};

// Half the bounding-box diagonal of the points, in degrees.
double default_grid_spacing(std::span<const GeoPoint> points);

double mean_orthodromic_km(std::span<const GeoPoint> points, const GeoPoint& center);

// Grid hill-climb minimising the mean orthodromic distance to `points`.
// Throws Error(EmptyPointSet); Error(ValidationError) unless e0 > e_min > 0.
GeoPoint free_place_center(std::span<const GeoPoint> points, double e0, double e_min);
GeoPoint free_place_center(std::span<const GeoPoint> points, const GridSearchOptions& options);

}  // namespace geoloc
