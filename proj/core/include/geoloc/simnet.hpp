#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geoloc/distcurve.hpp"
#include "geoloc/geo.hpp"
#include "geoloc/placement.hpp"
#include "geoloc/provider.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

// Signal speed in network cables: 225,000 km/s.
inline constexpr double kSignalKmPerMs = 225.0;

struct Measurement {
  NodeId landmark_id;
  std::string target_id;
  std::vector<double> rtt_samples;                       // ms
  std::map<std::string, std::vector<int>> hops_by_protocol;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

// A traceroute protocol whose hop count is under-reported by `offset`
// (negative) with the given probability, modelling silent routers.
struct ProtocolBehaviour {
  std::string name;
  int offset = 0;
  double probability = 0.0;
};

struct NoiseModel {
  double stochastic_mean_ms = 0.5;  // exponential queueing delay per RTT sample
  double per_hop_jitter_ms = 0.01;  // exponential extra delay per hop and sample
  std::uint64_t seed = 1;
  int probes = 10;
  int traces_per_protocol = 3;
  std::vector<ProtocolBehaviour> protocols{{"icmp", 0, 0.0}, {"udp", -1, 0.2}, {"tcp", -2, 0.2}};

  static NoiseModel zero(std::uint64_t seed = 1);
  void validate() const;  // throws Error(ConfigError)
};

struct SimTarget {
  std::string id;
  GeoPoint position;
};

struct SimulationOptions {
  double attach_radius_km = 500.0;
  double last_mile_ms = 0.0;  // extra one-way delay at the target
  bool target_unresponsive = false;  // measure up to the last hop before the target
  // Road distance landmark -> attachment node -> target instead of the
  // direct landmark -> target road distance.
  bool route_via_attachment = false;
  std::int64_t timestamp_ms = 0;
};

// Deterministic per-(seed, landmark, target) stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view landmark, std::string_view target);

// Synthetic ping + traceroute from a landmark to a target. The target is
// attached to its nearest topology node for hop counting; propagation uses
// the provider's road distance from landmark to target (or via the
// attachment node, see SimulationOptions). Throws
// Error(UnattachableTarget), Error(UnknownNode).
Measurement simulate_measurement(const Topology& t, const NodeId& landmark, const SimTarget& target,
                                 const NoiseModel& noise, DistanceProvider& provider,
                                 const SimulationOptions& options = {});

struct SelectedMeasurement {
  double rtt_min_ms = 0.0;
  int hop_count = 0;
};

// Minimum RTT; hop count = max over protocols of the per-protocol minimum.
SelectedMeasurement select_measurement(const Measurement& m);

// Every ordered landmark pair, landmark order preserved.
std::vector<Measurement> measure_landmark_pairs(const Topology& t, const LandmarkSet& landmarks,
                                                const NoiseModel& noise, DistanceProvider& provider);

// Selection + latency correction + road distance. Pairs whose endpoints
// coincide are skipped.
std::vector<TrainingPair> training_from_measurements(const Topology& t,
                                                     const std::vector<Measurement>& measurements,
                                                     DistanceProvider& provider);

std::vector<TrainingPair> generate_training_set(const Topology& t, const LandmarkSet& landmarks,
                                                const NoiseModel& noise, DistanceProvider& provider);

struct Region {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;
};

// Random geometric graph: `nodes` points uniform in `region`, each joined
// to its `degree` nearest neighbours, components then bridged by their
// closest node pair. Node ids are "n00", "n01", ...
Topology make_synthetic_topology(int nodes, const Region& region, std::uint64_t seed,
                                 int degree = 3);

// `count` targets uniform in `region`, ids "t000", "t001", ...
std::vector<SimTarget> random_targets(int count, const Region& region, std::uint64_t seed);

}  // namespace geoloc
