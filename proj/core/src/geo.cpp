#include "geoloc/geo.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "geoloc/error.hpp"

namespace geoloc {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon > -180.0 && p.lon <= 180.0;
}

GeoPoint make_geo_point(double lat, double lon) {
  // -180 and 180 are the same meridian; the canonical form is 180.
  GeoPoint p{lat, lon == -180.0 ? 180.0 : lon};
  if (!is_valid(p)) {
    std::ostringstream os;
    os << "invalid coordinate (" << lat << ", " << lon << ")";
    throw Error(ErrorCode::ValidationError, os.str());
  }
  return p;
}

double normalize_lon(double lon) noexcept {
  double r = std::fmod(lon + 180.0, 360.0);
  if (r <= 0.0) r += 360.0;
  return r - 180.0;
}

KmDistance::KmDistance(double km) : km_(km) {
  if (!std::isfinite(km) || km < 0.0) {
    std::ostringstream os;
    os << "distance must be finite and non-negative, got " << km;
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

KmDistance orthodromic_distance(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return KmDistance(0.0);
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat +
             std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return KmDistance(2.0 * kEarthRadiusKm * std::asin(std::sqrt(h)));
}

double km_per_degree_lon(double lat_deg) noexcept {
  return std::max(0.0, kPlaneKmPerDegree * std::cos(lat_deg * kDegToRad));
}

PlaneFrame::PlaneFrame(double ref_lat_deg)
    : ref_lat_(ref_lat_deg), lon_scale_(std::cos(ref_lat_deg * kDegToRad)) {
  if (!std::isfinite(ref_lat_deg) || std::abs(ref_lat_deg) >= 89.0) {
    std::ostringstream os;
    os << "plane transform degenerate at reference latitude " << ref_lat_deg;
    throw Error(ErrorCode::DomainError, os.str());
  }
}

PlanarPoint PlaneFrame::to_plane(const GeoPoint& p) const noexcept {
  return {p.lon * lon_scale_, p.lat};
}

GeoPoint PlaneFrame::to_geo(const PlanarPoint& p) const noexcept {
  return {std::clamp(p.y, -90.0, 90.0), normalize_lon(p.x / lon_scale_)};
}

PlanarCircle to_plane(const GeoPoint& point, KmDistance km_radius, double ref_lat_deg) {
  const PlaneFrame frame(ref_lat_deg);
  return {frame.to_plane(point), PlaneFrame::km_to_degrees(km_radius.km())};
}

}  // namespace geoloc
