#include "geoloc/placement.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "geoloc/error.hpp"

namespace geoloc {
namespace {

using Indices = std::vector<std::size_t>;

void require_connected(const HopMatrix& hops) {
  if (!hops.connected()) {
    throw Error(ErrorCode::DisconnectedGraph, "placement requires a connected topology");
  }
}

void require_k(const Topology& t, int k) {
  if (k < 1) throw Error(ErrorCode::ConfigError, "k must be at least 1");
  if (static_cast<std::size_t>(k) > t.size()) {
    std::ostringstream os;
    os << "k=" << k << " exceeds the " << t.size() << " nodes of the topology";
    throw Error(ErrorCode::KTooLarge, os.str());
  }
}

PlacementScore score_of(const HopMatrix& hops, const Indices& landmarks) {
  PlacementScore s;
  const std::size_t n = hops.size();
  for (std::size_t v = 0; v < n; ++v) {
    int best = std::numeric_limits<int>::max();
    for (const auto lm : landmarks) best = std::min(best, hops(lm, v));
    s.max_dist = std::max(s.max_dist, best);
    s.total_dist += best;
  }
  s.mean_dist = n == 0 ? 0.0 : static_cast<double>(s.total_dist) / static_cast<double>(n);
  return s;
}

Indices to_indices(const Topology& t, const LandmarkSet& set) {
  Indices out;
  out.reserve(set.k());
  for (const auto& id : set.members) out.push_back(t.index_of(id));
  return out;
}

LandmarkSet to_set(const Topology& t, const Indices& idx) {
  LandmarkSet set;
  for (const auto i : idx) set.members.push_back(t.node(i).id);
  return set;
}

std::size_t center_index(const HopMatrix& hops) {
  std::size_t best = 0;
  int best_ecc = std::numeric_limits<int>::max();
  std::int64_t best_sum = std::numeric_limits<std::int64_t>::max();
  for (std::size_t v = 0; v < hops.size(); ++v) {
    const auto row = hops.row(v);
    const int ecc = *std::max_element(row.begin(), row.end());
    const std::int64_t sum = std::accumulate(row.begin(), row.end(), std::int64_t{0});
    // Strict comparison keeps the smallest index (= smallest id) on ties.
    if (ecc < best_ecc || (ecc == best_ecc && sum < best_sum)) {
      best = v;
      best_ecc = ecc;
      best_sum = sum;
    }
  }
  return best;
}

Indices gonzalez(const HopMatrix& hops, std::size_t orientation, int k) {
  const std::size_t n = hops.size();
  std::vector<int> closest(hops.row(orientation).begin(), hops.row(orientation).end());
  Indices chosen;
  std::vector<bool> taken(n, false);
  // The orientation mark only seeds the first pick and is then dropped, so
  // `closest` is reset to the first landmark's distances after that pick.
  for (int i = 0; i < k; ++i) {
    std::size_t far = n;
    int far_dist = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!taken[v] && closest[v] > far_dist) {
        far = v;
        far_dist = closest[v];
      }
    }
    chosen.push_back(far);
    taken[far] = true;
    const auto row = hops.row(far);
    if (i == 0) {
      closest.assign(row.begin(), row.end());
    } else {
      for (std::size_t v = 0; v < n; ++v) closest[v] = std::min(closest[v], row[v]);
    }
  }
  return chosen;
}

bool refine_pass(const Topology& t, const HopMatrix& hops, Indices& landmarks) {
  bool changed = false;
  PlacementScore current = score_of(hops, landmarks);
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const auto origin = landmarks[i];
    std::optional<std::size_t> best_move;
    PlacementScore best = current;
    for (const auto v : t.neighbors(origin)) {
      if (std::find(landmarks.begin(), landmarks.end(), v) != landmarks.end()) continue;
      landmarks[i] = v;
      const auto s = score_of(hops, landmarks);
      if (s < best) {
        best = s;
        best_move = v;
      }
    }
    landmarks[i] = best_move.value_or(origin);
    if (best_move) {
      current = best;
      changed = true;
    }
  }
  return changed;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kBruteForceLimit * 1000) return std::numeric_limits<std::uint64_t>::max();
  }
  return r;
}

}  // namespace

PlacementScore placement_score(const Topology& t, const LandmarkSet& landmarks) {
  return score_of(HopMatrix(t), to_indices(t, landmarks));
}

NodeId orientation_center(const Topology& t) {
  if (t.empty()) throw Error(ErrorCode::ValidationError, "empty topology");
  const HopMatrix hops(t);
  require_connected(hops);
  return t.node(center_index(hops)).id;
}

LandmarkSet init_2approx(const Topology& t, int k) {
  require_k(t, k);
  const HopMatrix hops(t);
  require_connected(hops);
  return to_set(t, gonzalez(hops, center_index(hops), k));
}

RefineResult refine_step(const Topology& t, const LandmarkSet& landmarks) {
  const HopMatrix hops(t);
  auto idx = to_indices(t, landmarks);
  const bool changed = refine_pass(t, hops, idx);
  return {to_set(t, idx), changed};
}

PlacementResult dragoon(const Topology& t, int k) {
  require_k(t, k);
  const HopMatrix hops(t);
  require_connected(hops);
  auto idx = gonzalez(hops, center_index(hops), k);
  PlacementResult result;
  // Every accepted move strictly lowers (max, sum), so this terminates.
  while (refine_pass(t, hops, idx)) ++result.refine_passes;
  result.landmarks = to_set(t, idx);
  result.score = score_of(hops, idx);
  return result;
}

PlacementResult brute_force_kcenter(const Topology& t, int k) {
  require_k(t, k);
  const auto combos = binomial(t.size(), static_cast<std::uint64_t>(k));
  if (combos > kBruteForceLimit) {
    std::ostringstream os;
    os << "C(" << t.size() << ", " << k << ") exceeds " << kBruteForceLimit;
    throw Error(ErrorCode::TooLargeForBruteForce, os.str());
  }
  const HopMatrix hops(t);
  require_connected(hops);

  const std::size_t n = t.size();
  Indices combo(static_cast<std::size_t>(k));
  std::iota(combo.begin(), combo.end(), std::size_t{0});
  Indices best_combo = combo;
  PlacementScore best = score_of(hops, combo);
  while (true) {
    // Next combination in lexicographic order.
    std::size_t i = combo.size();
    while (i > 0 && combo[i - 1] == n - combo.size() + i - 1) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < combo.size(); ++j) combo[j] = combo[j - 1] + 1;
    const auto s = score_of(hops, combo);
    if (s < best) {
      best = s;
      best_combo = combo;
    }
  }
  return {to_set(t, best_combo), best, 0};
}

double default_grid_spacing(std::span<const GeoPoint> points) {
  if (points.empty()) return 0.0;
  auto [lat_lo, lat_hi] = std::minmax_element(points.begin(), points.end(),
      [](const GeoPoint& a, const GeoPoint& b) { return a.lat < b.lat; });
  auto [lon_lo, lon_hi] = std::minmax_element(points.begin(), points.end(),
      [](const GeoPoint& a, const GeoPoint& b) { return a.lon < b.lon; });
  return 0.5 * std::hypot(lat_hi->lat - lat_lo->lat, lon_hi->lon - lon_lo->lon);
}

namespace {

constexpr double kRad = std::numbers::pi / 180.0;

// Points pre-converted for repeated haversine evaluation.
struct PreparedPoints {
  std::vector<double> lat;
  std::vector<double> lon;
  std::vector<double> cos_lat;

  explicit PreparedPoints(std::span<const GeoPoint> pts) {
    lat.reserve(pts.size());
    lon.reserve(pts.size());
    cos_lat.reserve(pts.size());
    for (const auto& p : pts) {
      lat.push_back(p.lat * kRad);
      lon.push_back(p.lon * kRad);
      cos_lat.push_back(std::cos(p.lat * kRad));
    }
  }

  double total_km(const GeoPoint& c) const {
    const double clat = c.lat * kRad;
    const double clon = c.lon * kRad;
    const double ccos = std::cos(clat);
    double sum = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const double s1 = std::sin((lat[i] - clat) * 0.5);
      const double s2 = std::sin((lon[i] - clon) * 0.5);
      const double h = std::min(1.0, s1 * s1 + ccos * cos_lat[i] * s2 * s2);
      sum += std::asin(std::sqrt(h));
    }
    return 2.0 * kEarthRadiusKm * sum;
  }
};

}  // namespace

double mean_orthodromic_km(std::span<const GeoPoint> points, const GeoPoint& center) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointSet, "no points");
  return PreparedPoints(points).total_km(center) / static_cast<double>(points.size());
}

GeoPoint free_place_center(std::span<const GeoPoint> points, double e0, double e_min) {
  return free_place_center(points, GridSearchOptions{e0, e_min, std::nullopt});
}

GeoPoint free_place_center(std::span<const GeoPoint> points, const GridSearchOptions& options) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointSet, "free placement needs points");
  if (!(options.e_min > 0.0) || !(options.e0 > options.e_min)) {
    std::ostringstream os;
    os << "grid spacing requires e0 > e_min > 0 (e0=" << options.e0 << ", e_min=" << options.e_min
       << ")";
    throw Error(ErrorCode::ValidationError, os.str());
  }

  GeoPoint center;
  if (options.start) {
    center = *options.start;
  } else {
    double lat = 0.0, lon = 0.0;
    for (const auto& p : points) {
      lat += p.lat;
      lon += p.lon;
    }
    center = {lat / static_cast<double>(points.size()), lon / static_cast<double>(points.size())};
  }

  const PreparedPoints prepared(points);
  double best = prepared.total_km(center);
  static constexpr std::array<std::array<int, 2>, 8> kNeighborhood{{
      {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

  double e = options.e0;
  while (e >= options.e_min) {
    GeoPoint best_candidate = center;
    bool improved = false;
    for (const auto& [dlat, dlon] : kNeighborhood) {
      const GeoPoint candidate{std::clamp(center.lat + dlat * e, -90.0, 90.0),
                               normalize_lon(center.lon + dlon * e)};
      const double value = prepared.total_km(candidate);
      if (value < best) {
        best = value;
        best_candidate = candidate;
        improved = true;
      }
    }
    if (improved) {
      center = best_candidate;
    } else {
      e /= 2.0;
    }
  }
  return center;
}

}  // namespace geoloc
