#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geoloc/estimator.hpp"
#include "geoloc/provider.hpp"
#include "geoloc/simnet.hpp"
#include "geoloc/topology.hpp"

namespace geoloc::cli {

struct SyntheticTopology {
  int nodes = 30;
  Region region{0.0, 2.0, 10.0, 12.0};
  std::uint64_t seed = 7;
  int degree = 3;
};

struct TopologySource {
  std::optional<std::filesystem::path> path;
  TopologyFormat format = TopologyFormat::Json;
  std::optional<SyntheticTopology> synthetic;  // used when path is absent
};

enum class ProviderMode { OfflineDetour, Http };

struct ProviderSettings {
  ProviderMode mode = ProviderMode::OfflineDetour;
  double detour_factor = 1.2;
  std::string base_url;
  int timeout_ms = 2000;
  std::optional<std::filesystem::path> cache_path;
};

struct TargetSettings {
  int count = 20;
  std::optional<Region> region;  // default: topology bounding box
  std::uint64_t seed = 11;
};

struct EvalSettings {
  // Extra landmark counts evaluated for the landmark-count comparison.
  std::vector<int> compare_k;
  bool baseline = true;  // also evaluate the 2-Approx landmark set
  int threads = 0;       // 0: hardware concurrency
};

struct PipelineConfig {
  TopologySource topology;
  int k = 5;
  NoiseModel noise;
  SimulationOptions simulation;  // applies to target measurements
  ProviderSettings provider;
  LocalizeConfig estimator;
  TargetSettings targets;
  EvalSettings eval;
  std::filesystem::path out = "out";
};

// Parses a JSON config; relative paths resolve against `base_dir`. Throws
// Error(ConfigError) for unknown keys, wrong types or violated invariants.
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// k >= 2, e_min > 0, referenced input files exist. Throws Error(ConfigError).
void validate(const PipelineConfig& config);

// Canonical JSON form of a config (every key, defaults filled in).
std::string config_to_json(const PipelineConfig& config);

}  // namespace geoloc::cli
