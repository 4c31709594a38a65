#include "geoloc/lateration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geoloc/error.hpp"

namespace geoloc {

LaterationCircle make_circle(NodeId landmark_id, const GeoPoint& position, KmDistance km,
                             const PlaneFrame& frame) {
  return {std::move(landmark_id), frame.to_plane(position), PlaneFrame::km_to_degrees(km.km()), km};
}

LaterationCircle scaled(const LaterationCircle& c, double factor) {
  return {c.landmark_id, c.center, c.radius * factor, KmDistance(c.source_km.km() * factor)};
}

const char* to_string(IntersectionCase c) {
  switch (c) {
    case IntersectionCase::DisjointAdjusted: return "DISJOINT_ADJUSTED";
    case IntersectionCase::ContainedAdjusted: return "CONTAINED_ADJUSTED";
    case IntersectionCase::Tangent: return "TANGENT";
    case IntersectionCase::TwoPoints: return "TWO_POINTS";
    case IntersectionCase::CoincidentDegenerate: return "COINCIDENT_DEGENERATE";
  }
  return "?";
}

namespace {

bool canonical_less(const LaterationCircle& a, const LaterationCircle& b) {
  if (a.center.x != b.center.x) return a.center.x < b.center.x;
  if (a.center.y != b.center.y) return a.center.y < b.center.y;
  return a.radius < b.radius;
}

PlanarPoint along(const PlanarPoint& from, double ux, double uy, double t) {
  return {from.x + ux * t, from.y + uy * t};
}

// Works on circles in canonical order so the result is independent of the
// argument order.
IntersectionResult intersect_ordered(const LaterationCircle& a, const LaterationCircle& b,
                                     double eps) {
  IntersectionResult out;
  const double dx = b.center.x - a.center.x;
  const double dy = b.center.y - a.center.y;
  const double d = std::hypot(dx, dy);
  const double ra = a.radius;
  const double rb = b.radius;

  if (d <= eps) {
    if (std::abs(ra - rb) <= eps) {
      throw Error(ErrorCode::CoincidentCenters,
                  "circles of '" + a.landmark_id + "' and '" + b.landmark_id + "' coincide");
    }
    out.kind = IntersectionCase::CoincidentDegenerate;
    return out;
  }
  const double ux = dx / d;
  const double uy = dy / d;

  // External contact: both radii scaled by the same factor.
  const bool external_tangent = std::abs(d - (ra + rb)) <= eps;
  if (external_tangent || d > ra + rb) {
    if (ra + rb <= 0.0) {
      out.kind = IntersectionCase::CoincidentDegenerate;
      return out;
    }
    const double s = d / (ra + rb);
    out.kind = external_tangent ? IntersectionCase::Tangent : IntersectionCase::DisjointAdjusted;
    out.adjustment = {s, s};
    out.points.push_back(along(a.center, ux, uy, ra * s));
    return out;
  }

  // Internal contact: only the larger radius moves.
  const bool internal_tangent = std::abs(d - std::abs(ra - rb)) <= eps;
  if (internal_tangent || d < std::abs(ra - rb)) {
    const bool a_larger = ra > rb;
    const LaterationCircle& small = a_larger ? b : a;
    const double r_large = a_larger ? ra : rb;
    const double factor = (d + small.radius) / r_large;
    // Direction from the larger center through the smaller one.
    const double sign = a_larger ? 1.0 : -1.0;
    out.kind = internal_tangent ? IntersectionCase::Tangent : IntersectionCase::ContainedAdjusted;
    out.adjustment = a_larger ? std::array<double, 2>{factor, 1.0} : std::array<double, 2>{1.0, factor};
    out.points.push_back(along(small.center, sign * ux, sign * uy, small.radius));
    return out;
  }

  const double along_a = (d * d + ra * ra - rb * rb) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, ra * ra - along_a * along_a));
  const PlanarPoint mid = along(a.center, ux, uy, along_a);
  out.kind = IntersectionCase::TwoPoints;
  out.points.push_back({mid.x - uy * h, mid.y + ux * h});
  out.points.push_back({mid.x + uy * h, mid.y - ux * h});
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace

IntersectionResult intersect(const LaterationCircle& c1, const LaterationCircle& c2, double eps) {
  if (!canonical_less(c2, c1)) return intersect_ordered(c1, c2, eps);
  auto result = intersect_ordered(c2, c1, eps);
  std::swap(result.adjustment[0], result.adjustment[1]);
  return result;
}

std::vector<GeoPoint> PointCloud::geo_points() const {
  std::vector<GeoPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(frame.to_geo(p.point));
  return out;
}

PointCloud build_point_cloud(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                             const CloudOptions& options) {
  if (circles.size() < 2) {
    std::ostringstream os;
    os << "lateration needs at least 2 circles, got " << circles.size();
    throw Error(ErrorCode::TooFewCircles, os.str());
  }
  std::vector<std::size_t> order(circles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return circles[i].landmark_id < circles[j].landmark_id;
  });

  PointCloud cloud{frame, {}, 0, 0};
  cloud.points.reserve(circles.size() * (circles.size() - 1));
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto& a = circles[order[i]];
      const auto& b = circles[order[j]];
      IntersectionResult r;
      try {
        r = intersect(a, b, options.eps);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CoincidentCenters) throw;
        ++cloud.skipped_pairs;
        continue;
      }
      if (r.kind == IntersectionCase::CoincidentDegenerate) {
        ++cloud.skipped_pairs;
        continue;
      }
      if (r.kind == IntersectionCase::ContainedAdjusted &&
          options.contained == ContainedPolicy::Drop) {
        ++cloud.dropped_pairs;
        continue;
      }
      for (const auto& p : r.points) {
        cloud.points.push_back({p, {a.landmark_id, b.landmark_id}, r.kind});
      }
    }
  }
  return cloud;
}

}  // namespace geoloc
