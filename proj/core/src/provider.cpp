#include "geoloc/provider.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "geoloc/error.hpp"

namespace geoloc {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // Avoid "-0.00000" and "0.00000" producing different keys.
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

}  // namespace

DetourProvider::DetourProvider(double factor) : factor_(factor) {
  if (!std::isfinite(factor) || factor < 1.0) {
    throw Error(ErrorCode::ConfigError, "detour factor must be >= 1");
  }
}

std::string DetourProvider::id() const {
  std::ostringstream os;
  os << "detour:" << factor_;
  return os.str();
}

std::optional<double> DetourProvider::route_km(const GeoPoint& a, const GeoPoint& b) {
  return factor_ * orthodromic_distance(a, b).km();
}

HttpRoutingProvider::HttpRoutingProvider(std::string base_url, std::chrono::milliseconds timeout,
                                         std::string profile)
    : timeout_(timeout), profile_(std::move(profile)) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos || base_url.substr(0, scheme_end) != "http" ||
      scheme_end + 3 >= base_url.size()) {
    throw Error(ErrorCode::ConfigError, "routing base URL must look like http://host[:port][/path]");
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (profile_.empty()) throw Error(ErrorCode::ConfigError, "routing profile must not be empty");
}

std::string HttpRoutingProvider::id() const { return "osrm:" + origin_ + prefix_ + "/" + profile_; }

std::string HttpRoutingProvider::request_path(const GeoPoint& a, const GeoPoint& b) const {
  return prefix_ + "/route/v1/" + profile_ + "/" + fixed(a.lon, 6) + "," + fixed(a.lat, 6) + ";" +
         fixed(b.lon, 6) + "," + fixed(b.lat, 6) + "?overview=false&alternatives=false&steps=false";
}

std::optional<double> HttpRoutingProvider::route_km(const GeoPoint& a, const GeoPoint& b) {
  // httplib::Client is not thread-safe; one per request.
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto res = client.Get(request_path(a, b));
  if (!res || res->status != 200) return std::nullopt;
  try {
    const auto body = nlohmann::json::parse(res->body);
    if (body.value("code", std::string{}) != "Ok") return std::nullopt;
    const auto& routes = body.at("routes");
    if (!routes.is_array() || routes.empty()) return std::nullopt;
    const double meters = routes.at(0).at("distance").get<double>();
    if (!std::isfinite(meters) || meters < 0.0) return std::nullopt;
    return meters / 1000.0;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

std::string cache_key(const GeoPoint& a, const GeoPoint& b, const std::string& provider_id) {
  return fixed(a.lat, 5) + "," + fixed(a.lon, 5) + "|" + fixed(b.lat, 5) + "," + fixed(b.lon, 5) +
         "|" + provider_id;
}

CachedProvider::CachedProvider(DistanceProvider& upstream, std::filesystem::path cache_file)
    : upstream_(upstream), file_(std::move(cache_file)) {
  std::ifstream in(file_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("km").get<double>();
    } catch (const nlohmann::json::exception& e) {
      std::ostringstream os;
      os << file_.string() << ":" << line_no << ": " << e.what();
      throw Error(ErrorCode::ParseError, os.str());
    }
  }
}

std::optional<double> CachedProvider::route_km(const GeoPoint& a, const GeoPoint& b) {
  const auto key = cache_key(a, b, upstream_.id());
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  ++upstream_calls_;
  const auto km = upstream_.route_km(a, b);
  if (!km) return km;

  std::lock_guard lock(mutex_);
  if (entries_.emplace(key, *km).second) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::ofstream out(file_, std::ios::app);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to cache " + file_.string());
    out << nlohmann::json{{"key", key}, {"km", *km}}.dump() << '\n';
  }
  return km;
}

std::size_t CachedProvider::cached_entries() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

RoadDistance road_distance(DistanceProvider& provider, const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return {KmDistance(0.0), false};
  const auto km = provider.route_km(a, b);
  if (km && std::isfinite(*km) && *km >= 0.0) return {KmDistance(*km), false};
  return {KmDistance(kFallbackDetour * orthodromic_distance(a, b).km()), true};
}

}  // namespace geoloc
