#pragma once

#include <cmath>

namespace geoloc {

// Mean Earth radius used for all great-circle distances.
inline constexpr double kEarthRadiusKm = 6371.0;

// Kilometers per degree used when mapping km radii into the lateration
// plane. Deliberately not derived from kEarthRadiusKm.
inline constexpr double kPlaneKmPerDegree = 113.325;

// Latitude/longitude in degrees. lat in [-90, 90], lon in (-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

// Throws Error(ValidationError) on out-of-range or non-finite input. The
// longitude -180 is folded onto 180.
GeoPoint make_geo_point(double lat, double lon);

// Wraps any finite longitude into (-180, 180].
double normalize_lon(double lon) noexcept;

class KmDistance {
 public:
  constexpr KmDistance() = default;
  // Throws Error(ValidationError) if km is negative or not finite.
  explicit KmDistance(double km);

  constexpr double km() const noexcept { return km_; }

  friend auto operator<=>(const KmDistance&, const KmDistance&) = default;

 private:
  double km_ = 0.0;
};

// Haversine great-circle distance on a sphere of radius kEarthRadiusKm.
KmDistance orthodromic_distance(const GeoPoint& a, const GeoPoint& b);

inline constexpr double km_per_degree_lat() noexcept { return kPlaneKmPerDegree; }
double km_per_degree_lon(double lat_deg) noexcept;

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
  friend auto operator<=>(const PlanarPoint&, const PlanarPoint&) = default;
};

inline double planar_distance(const PlanarPoint& a, const PlanarPoint& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct PlanarCircle {
  PlanarPoint center;
  double radius = 0.0;  // latitude-degrees
};

// Local isotropic degree plane around a reference latitude: x = lon * cos(ref),
// y = lat, lengths measured in latitude-degrees of kPlaneKmPerDegree km.
class PlaneFrame {
 public:
  // Throws Error(DomainError) when |ref_lat| >= 89.
  explicit PlaneFrame(double ref_lat_deg = 0.0);

  double ref_lat() const noexcept { return ref_lat_; }

  PlanarPoint to_plane(const GeoPoint& p) const noexcept;
  GeoPoint to_geo(const PlanarPoint& p) const noexcept;

  static double km_to_degrees(double km) noexcept { return km / kPlaneKmPerDegree; }
  static double degrees_to_km(double deg) noexcept { return deg * kPlaneKmPerDegree; }

 private:
  double ref_lat_;
  double lon_scale_;
};

PlanarCircle to_plane(const GeoPoint& point, KmDistance km_radius, double ref_lat_deg);

}  // namespace geoloc
