#include "geoloc/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geoloc/error.hpp"

namespace geoloc {
namespace {

// Uniform in [0, 1) from the top 53 bits; independent of libstdc++'s
// distribution implementations so outputs are stable across toolchains.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0.0;
  return -mean * std::log1p(-uniform01(rng));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

NoiseModel NoiseModel::zero(std::uint64_t seed) {
  NoiseModel m;
  m.stochastic_mean_ms = 0.0;
  m.per_hop_jitter_ms = 0.0;
  m.seed = seed;
  for (auto& p : m.protocols) p.probability = 0.0;
  return m;
}

void NoiseModel::validate() const {
  if (!(stochastic_mean_ms >= 0.0) || !(per_hop_jitter_ms >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "noise parameters must be non-negative");
  }
  if (probes < 1 || traces_per_protocol < 1) {
    throw Error(ErrorCode::ConfigError, "probes and traces_per_protocol must be at least 1");
  }
  if (protocols.empty()) throw Error(ErrorCode::ConfigError, "at least one protocol is required");
  for (const auto& p : protocols) {
    if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
      throw Error(ErrorCode::ConfigError, "protocol probability must lie in [0, 1]");
    }
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view landmark, std::string_view target) {
  // FNV-1a over the ids, mixed with the base seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (const unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(landmark);
  feed(target);
  return splitmix64(seed ^ splitmix64(h));
}

Measurement simulate_measurement(const Topology& t, const NodeId& landmark, const SimTarget& target,
                                 const NoiseModel& noise, DistanceProvider& provider,
                                 const SimulationOptions& options) {
  noise.validate();
  const auto lm = t.index_of(landmark);
  const auto attach = nearest_node(t, target.position);
  const double attach_km = orthodromic_distance(target.position, t.node(attach).position).km();
  if (attach_km > options.attach_radius_km) {
    std::ostringstream os;
    os << "target '" << target.id << "' is " << attach_km << " km from the nearest node";
    throw Error(ErrorCode::UnattachableTarget, os.str());
  }
  const auto path = hop_path(t, lm, attach);
  if (path.empty()) {
    throw Error(ErrorCode::UnattachableTarget,
                "target '" + target.id + "' not reachable from '" + landmark + "'");
  }

  int hops = static_cast<int>(path.size()) - 1;
  GeoPoint endpoint = target.position;
  double last_mile = options.last_mile_ms;
  if (options.target_unresponsive && hops >= 1) {
    --hops;
    endpoint = t.node(path[path.size() - 2]).position;
    last_mile = 0.0;
  }

  double road_km = 0.0;
  if (options.route_via_attachment && !options.target_unresponsive) {
    const auto& hub = t.node(attach).position;
    road_km = road_distance(provider, t.node(lm).position, hub).distance.km() +
              road_distance(provider, hub, endpoint).distance.km();
  } else {
    road_km = road_distance(provider, t.node(lm).position, endpoint).distance.km();
  }
  const double one_way =
      road_km / kSignalKmPerMs + kPerHopDelayMs * hops + kProcessingDelayMs + last_mile;

  std::mt19937_64 rng(derive_seed(noise.seed, landmark, target.id));
  Measurement m;
  m.landmark_id = landmark;
  m.target_id = target.id;
  m.timestamp_ms = options.timestamp_ms;
  m.rtt_samples.reserve(static_cast<std::size_t>(noise.probes));
  for (int i = 0; i < noise.probes; ++i) {
    double rtt = 2.0 * one_way + exponential(rng, noise.stochastic_mean_ms);
    if (noise.per_hop_jitter_ms > 0.0) {
      for (int h = 0; h < hops; ++h) rtt += exponential(rng, noise.per_hop_jitter_ms);
    }
    m.rtt_samples.push_back(rtt);
  }
  for (const auto& proto : noise.protocols) {
    auto& trace = m.hops_by_protocol[proto.name];
    for (int i = 0; i < noise.traces_per_protocol; ++i) {
      const bool hit = uniform01(rng) < proto.probability;
      trace.push_back(std::max(0, hops + (hit ? proto.offset : 0)));
    }
  }
  return m;
}

SelectedMeasurement select_measurement(const Measurement& m) {
  if (m.rtt_samples.empty()) {
    throw Error(ErrorCode::ValidationError, "measurement has no RTT samples");
  }
  SelectedMeasurement out;
  out.rtt_min_ms = *std::min_element(m.rtt_samples.begin(), m.rtt_samples.end());
  bool any = false;
  for (const auto& [proto, trace] : m.hops_by_protocol) {
    if (trace.empty()) continue;
    const int shortest = *std::min_element(trace.begin(), trace.end());
    out.hop_count = any ? std::max(out.hop_count, shortest) : shortest;
    any = true;
  }
  if (!any) throw Error(ErrorCode::ValidationError, "measurement has no hop counts");
  return out;
}

std::vector<Measurement> measure_landmark_pairs(const Topology& t, const LandmarkSet& landmarks,
                                                const NoiseModel& noise,
                                                DistanceProvider& provider) {
  if (landmarks.k() < 2) {
    throw Error(ErrorCode::InsufficientData, "landmark-to-landmark training needs 2 landmarks");
  }
  std::vector<Measurement> out;
  out.reserve(landmarks.k() * (landmarks.k() - 1));
  for (const auto& a : landmarks.members) {
    for (const auto& b : landmarks.members) {
      if (a == b) continue;
      const SimTarget target{b, t.node(t.index_of(b)).position};
      out.push_back(simulate_measurement(t, a, target, noise, provider));
    }
  }
  return out;
}

std::vector<TrainingPair> training_from_measurements(const Topology& t,
                                                     const std::vector<Measurement>& measurements,
                                                     DistanceProvider& provider) {
  std::vector<TrainingPair> out;
  out.reserve(measurements.size());
  for (const auto& m : measurements) {
    const auto& from = t.node(t.index_of(m.landmark_id)).position;
    const auto& to = t.node(t.index_of(m.target_id)).position;
    const auto road = road_distance(provider, from, to);
    if (road.distance.km() <= 0.0) continue;
    const auto sel = select_measurement(m);
    const auto latency = corrected_latency(sel.rtt_min_ms, sel.hop_count);
    out.push_back({latency.ms, road.distance.km(), m.landmark_id, m.target_id});
  }
  return out;
}

std::vector<TrainingPair> generate_training_set(const Topology& t, const LandmarkSet& landmarks,
                                                const NoiseModel& noise,
                                                DistanceProvider& provider) {
  return training_from_measurements(t, measure_landmark_pairs(t, landmarks, noise, provider),
                                    provider);
}

}  // namespace geoloc

namespace geoloc {
namespace {

std::string padded_id(char prefix, int i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

GeoPoint uniform_in(std::mt19937_64& rng, const Region& r) {
  const double lat = r.lat_min + (r.lat_max - r.lat_min) * uniform01(rng);
  const double lon = r.lon_min + (r.lon_max - r.lon_min) * uniform01(rng);
  return {lat, lon};
}

void check_region(const Region& r) {
  if (!(r.lat_min < r.lat_max && r.lon_min < r.lon_max) || r.lat_min < -90.0 || r.lat_max > 90.0 ||
      r.lon_min < -180.0 || r.lon_max > 180.0) {
    throw Error(ErrorCode::ConfigError, "region bounds are empty or out of range");
  }
}

}  // namespace

Topology make_synthetic_topology(int nodes, const Region& region, std::uint64_t seed, int degree) {
  check_region(region);
  if (nodes < 1) throw Error(ErrorCode::ConfigError, "synthetic topology needs at least one node");
  if (degree < 1) throw Error(ErrorCode::ConfigError, "synthetic topology degree must be >= 1");

  std::mt19937_64 rng(splitmix64(seed ^ 0x746f706fULL));
  const int width = std::max(2, static_cast<int>(std::to_string(nodes - 1).size()));
  std::vector<Node> list;
  list.reserve(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) list.push_back({padded_id('n', i, width), uniform_in(rng, region), ""});

  const auto n = static_cast<std::size_t>(nodes);
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = orthodromic_distance(list[i].position, list[j].position).km();
    }
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto root = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto link = [&](std::size_t a, std::size_t b) {
    edges.emplace_back(list[a].id, list[b].id);
    parent[root(a)] = root(b);
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[i * n + a] != dist[i * n + b] ? dist[i * n + a] < dist[i * n + b] : a < b;
    });
    const auto take = std::min(order.size(), static_cast<std::size_t>(degree));
    for (std::size_t r = 0; r < take; ++r) link(i, order[r]);
  }

  // Bridge components with their closest pair until one remains.
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> bridge{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (root(i) != root(j) && dist[i * n + j] < best) {
          best = dist[i * n + j];
          bridge = {i, j};
        }
      }
    }
    if (!std::isfinite(best)) break;
    link(bridge.first, bridge.second);
  }
  return Topology(std::move(list), edges);
}

std::vector<SimTarget> random_targets(int count, const Region& region, std::uint64_t seed) {
  check_region(region);
  if (count < 0) throw Error(ErrorCode::ConfigError, "target count must be non-negative");
  std::mt19937_64 rng(splitmix64(seed ^ 0x74617267ULL));
  const int width = std::max(3, static_cast<int>(std::to_string(std::max(count - 1, 0)).size()));
  std::vector<SimTarget> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back({padded_id('t', i, width), uniform_in(rng, region)});
  return out;
}

}  // namespace geoloc
