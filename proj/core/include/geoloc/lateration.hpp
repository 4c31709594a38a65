#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "geoloc/geo.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

// A landmark's distance constraint in the lateration plane.
struct LaterationCircle {
  NodeId landmark_id;
  PlanarPoint center;
  double radius = 0.0;  // latitude-degrees, see PlaneFrame
  KmDistance source_km;
};

LaterationCircle make_circle(NodeId landmark_id, const GeoPoint& position, KmDistance km,
                             const PlaneFrame& frame);

// Same circle with radius (and source_km) multiplied by `factor`.
LaterationCircle scaled(const LaterationCircle& c, double factor);

enum class IntersectionCase {
  DisjointAdjusted,
  ContainedAdjusted,
  Tangent,
  TwoPoints,
  CoincidentDegenerate,
};

const char* to_string(IntersectionCase c);

struct IntersectionResult {
  IntersectionCase kind = IntersectionCase::CoincidentDegenerate;
  std::vector<PlanarPoint> points;  // sorted (x, then y)
  // Radius scale applied to the first and second argument circle
  // respectively; 1.0 means untouched.
  std::array<double, 2> adjustment{1.0, 1.0};
};

inline constexpr double kDefaultTangencyEps = 1e-6;

// Intersects two circles, adjusting radii when they do not meet:
//  - disjoint: both radii grow by the same factor d / (r1 + r2) until they
//    touch externally;
//  - one inside the other: the larger radius shrinks to d + r_small until
//    the circles touch internally;
//  - otherwise the tangency point or both crossing points.
// Centers closer than eps with radii equal within eps throw
// Error(CoincidentCenters); concentric circles with different radii (and two
// zero-radius circles) carry no direction and yield CoincidentDegenerate.
IntersectionResult intersect(const LaterationCircle& c1, const LaterationCircle& c2,
                             double eps = kDefaultTangencyEps);

// What to do with pairs where one circle lies inside the other.
enum class ContainedPolicy { Adjust, Drop };

struct CloudOptions {
  double eps = kDefaultTangencyEps;
  ContainedPolicy contained = ContainedPolicy::Adjust;
};

struct CloudPoint {
  PlanarPoint point;
  std::pair<NodeId, NodeId> origin;  // landmark ids, ordered
  IntersectionCase kind = IntersectionCase::TwoPoints;
};

struct PointCloud {
  PlaneFrame frame;
  std::vector<CloudPoint> points;
  std::size_t skipped_pairs = 0;   // coincident or degenerate pairs
  std::size_t dropped_pairs = 0;   // contained pairs discarded by policy

  std::vector<GeoPoint> geo_points() const;
};

// Intersects every unordered pair of circles. Points are ordered by the
// landmark-id pair that produced them. Throws Error(TooFewCircles) for fewer
// than two circles.
PointCloud build_point_cloud(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                             const CloudOptions& options = {});

}  // namespace geoloc
