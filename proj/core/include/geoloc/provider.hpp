#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "geoloc/geo.hpp"

namespace geoloc {

// Source of road-network distances. Implementations must be safe for
// concurrent calls.
class DistanceProvider {
 public:
  virtual ~DistanceProvider() = default;

  // Stable identifier, part of the on-disk cache key.
  virtual std::string id() const = 0;

  // Route length in km, or nullopt if no route could be obtained.
  virtual std::optional<double> route_km(const GeoPoint& a, const GeoPoint& b) = 0;
};

// Offline model: great-circle distance times a constant detour factor.
class DetourProvider final : public DistanceProvider {
 public:
  // Throws Error(ConfigError) unless factor >= 1.
  explicit DetourProvider(double factor = 1.2);

  std::string id() const override;
  std::optional<double> route_km(const GeoPoint& a, const GeoPoint& b) override;

  double factor() const noexcept { return factor_; }

 private:
  double factor_;
};

// OSRM-compatible HTTP routing client:
//   GET <base>/route/v1/<profile>/<lon>,<lat>;<lon>,<lat>?overview=false
// expecting {"code":"Ok","routes":[{"distance": <meters>, ...}]}.
class HttpRoutingProvider final : public DistanceProvider {
 public:
  // base_url like "http://localhost:5000" or "http://host:port/prefix".
  // Throws Error(ConfigError) for URLs without an http scheme or host.
  explicit HttpRoutingProvider(std::string base_url,
                               std::chrono::milliseconds timeout = std::chrono::seconds(2),
                               std::string profile = "driving");

  std::string id() const override;
  std::optional<double> route_km(const GeoPoint& a, const GeoPoint& b) override;

  // Request target (path + query) used for a pair; exposed for tests.
  std::string request_path(const GeoPoint& a, const GeoPoint& b) const;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // optional path prefix without trailing slash
  std::chrono::milliseconds timeout_;
  std::string profile_;
};

// JSON-lines disk cache in front of another provider. Each line is
// {"key": "<lat1>,<lon1>|<lat2>,<lon2>|<provider id>", "km": <value>} with
// coordinates rounded to 5 decimals. Failed lookups are not cached.
class CachedProvider final : public DistanceProvider {
 public:
  CachedProvider(DistanceProvider& upstream, std::filesystem::path cache_file);

  std::string id() const override { return upstream_.id(); }
  std::optional<double> route_km(const GeoPoint& a, const GeoPoint& b) override;

  std::size_t upstream_calls() const noexcept { return upstream_calls_.load(); }
  std::size_t cached_entries() const;

 private:
  DistanceProvider& upstream_;
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, double> entries_;
  std::atomic<std::size_t> upstream_calls_{0};
};

std::string cache_key(const GeoPoint& a, const GeoPoint& b, const std::string& provider_id);

// Road distance with a fallback of 1.10 x great-circle distance when the
// provider has no answer.
inline constexpr double kFallbackDetour = 1.10;

struct RoadDistance {
  KmDistance distance;
  bool fallback = false;
};

RoadDistance road_distance(DistanceProvider& provider, const GeoPoint& a, const GeoPoint& b);

}  // namespace geoloc
