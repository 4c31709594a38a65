#include "geoloc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geoloc/error.hpp"
#include "geoloc/placement.hpp"

namespace geoloc {
namespace {

std::vector<double> pairwise_km(std::span<const GeoPoint> points) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const std::size_t n = points.size();
  std::vector<double> lat(n), lon(n), cos_lat(n);
  for (std::size_t i = 0; i < n; ++i) {
    lat[i] = points[i].lat * kRad;
    lon[i] = points[i].lon * kRad;
    cos_lat[i] = std::cos(lat[i]);
  }
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s1 = std::sin((lat[j] - lat[i]) * 0.5);
      const double s2 = std::sin((lon[j] - lon[i]) * 0.5);
      const double h = std::min(1.0, s1 * s1 + cos_lat[i] * cos_lat[j] * s2 * s2);
      out.push_back(2.0 * kEarthRadiusKm * std::asin(std::sqrt(h)));
    }
  }
  return out;
}

}  // namespace

double cohesion(std::span<const GeoPoint> points) {
  if (points.size() < 2) {
    std::ostringstream os;
    os << "cohesion needs at least 2 points, got " << points.size();
    throw Error(ErrorCode::TooFewPoints, os.str());
  }
  auto d = pairwise_km(points);
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  const double median = n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
  // Distances that equal the median up to rounding count as ties, so
  // geometrically equal distances are not split by floating-point noise.
  const double cutoff = median - kMedianTieTolerance * median;
  double sum = 0.0;
  for (const double v : d) {
    if (!(v < cutoff)) break;
    sum += v;
  }
  return sum;
}

double cohesion(const PointCloud& cloud) {
  const auto pts = cloud.geo_points();
  return cohesion(pts);
}

TunedCircles self_tune(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                       const TuneOptions& options) {
  if (circles.size() < 2) {
    std::ostringstream os;
    os << "self-tuning needs at least 2 circles, got " << circles.size();
    throw Error(ErrorCode::TooFewCircles, os.str());
  }
  TunedCircles out{{circles.begin(), circles.end()}, {}};
  const auto initial = build_point_cloud(circles, frame, options.cloud);
  if (initial.points.size() < 2) return out;

  double best = cohesion(initial);
  out.trace.iterations.push_back({0, best});

  std::vector<LaterationCircle> trial(circles.size());
  for (int step = 1; step <= options.max_iterations; ++step) {
    // Scale from the originals so no rounding accumulates across steps.
    const double scale = std::pow(options.shrink_factor, step);
    for (std::size_t i = 0; i < circles.size(); ++i) trial[i] = scaled(circles[i], scale);
    const auto cloud = build_point_cloud(trial, frame, options.cloud);
    if (cloud.points.size() < 2) break;
    const double c = cohesion(cloud);
    if (!(c < best)) break;
    best = c;
    out.circles = trial;
    out.trace.iterations.push_back({step, c});
    out.trace.accepted_steps = step;
    out.trace.final_scale = scale;
    out.trace.hit_cap = step == options.max_iterations;
  }
  return out;
}

Estimate filter_and_estimate(const PointCloud& cloud, int n_landmarks, double e_min) {
  if (cloud.points.empty()) throw Error(ErrorCode::EmptyCloud, "no intersection points to filter");
  if (n_landmarks < 2) throw Error(ErrorCode::ValidationError, "n_landmarks must be at least 2");

  std::vector<GeoPoint> pts = cloud.geo_points();
  std::vector<std::pair<NodeId, NodeId>> origins;
  origins.reserve(cloud.points.size());
  for (const auto& p : cloud.points) origins.push_back(p.origin);

  Estimate est;
  est.cloud = cloud;
  est.cloud_history.push_back(pts.size());

  auto center_of = [&](const std::optional<GeoPoint>& start) {
    const double e0 = std::max(default_grid_spacing(pts), 2.0 * e_min);
    return free_place_center(pts, GridSearchOptions{e0, e_min, start});
  };

  std::optional<GeoPoint> previous;
  while (pts.size() >= static_cast<std::size_t>(n_landmarks)) {
    const GeoPoint center = center_of(previous);
    previous = center;
    std::size_t far = 0;
    double far_km = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = orthodromic_distance(center, pts[i]).km();
      if (d > far_km) {
        far_km = d;
        far = i;
      }
    }
    est.removed.push_back({pts[far], origins[far]});
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(far));
    origins.erase(origins.begin() + static_cast<std::ptrdiff_t>(far));
    est.cloud_history.push_back(pts.size());
  }

  est.location = center_of(previous);
  double radius = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    radius = std::max(radius, orthodromic_distance(est.location, pts[i]).km());
    est.retained.push_back({pts[i], origins[i]});
  }
  est.error_radius_km = KmDistance(radius);
  return est;
}

Estimate localize(std::span<const LaterationCircle> circles, const PlaneFrame& frame,
                  int n_landmarks, const LocalizeConfig& config) {
  if (circles.size() < 2) {
    std::ostringstream os;
    os << "localization needs at least 2 circles, got " << circles.size();
    throw Error(ErrorCode::TooFewCircles, os.str());
  }
  const CloudOptions cloud_options{config.eps, config.contained};
  TunedCircles tuned{{circles.begin(), circles.end()}, {}};
  if (config.self_tune) {
    tuned = self_tune(circles, frame, TuneOptions{0.99, config.shrink_cap, cloud_options});
  }
  const auto cloud = build_point_cloud(tuned.circles, frame, cloud_options);
  Estimate est = filter_and_estimate(cloud, n_landmarks, config.e_min);
  est.tuning = std::move(tuned.trace);
  return est;
}

}  // namespace geoloc
