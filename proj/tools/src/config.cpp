#include "config.hpp"

#include <algorithm>
#include <initializer_list>

#include <json.hpp>

#include "geoloc/error.hpp"
#include "geoloc/serialize.hpp"

namespace geoloc::cli {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& into, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string(where) + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Region read_region(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 4) fail(std::string(where) + " must be [lat_min, lat_max, lon_min, lon_max]");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  } catch (const json::exception&) {
    fail(std::string(where) + " must hold numbers");
  }
}

ordered_json region_json(const Region& r) {
  return ordered_json::array({r.lat_min, r.lat_max, r.lon_min, r.lon_max});
}

ContainedPolicy parse_policy(const std::string& s) {
  if (s == "adjust") return ContainedPolicy::Adjust;
  if (s == "drop") return ContainedPolicy::Drop;
  fail("estimator.contained must be 'adjust' or 'drop'");
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(doc, "config", {"topology", "k", "noise", "simulation", "provider", "estimator", "targets", "eval",
                           "out"});

  PipelineConfig c;
  if (doc.contains("topology")) {
    const auto& t = doc["topology"];
    allow_keys(t, "topology", {"path", "format", "synthetic"});
    if (t.contains("path")) {
      std::string p;
      read(t, "path", p, "topology");
      c.topology.path = resolve(base_dir, p);
    }
    if (t.contains("format")) {
      std::string f;
      read(t, "format", f, "topology");
      try {
        c.topology.format = parse_topology_format(f);
      } catch (const Error&) {
        fail("topology.format must be 'json' or 'graphml'");
      }
    }
    if (t.contains("synthetic")) {
      const auto& s = t["synthetic"];
      allow_keys(s, "topology.synthetic", {"nodes", "region", "seed", "degree"});
      SyntheticTopology syn;
      read(s, "nodes", syn.nodes, "topology.synthetic");
      read(s, "seed", syn.seed, "topology.synthetic");
      read(s, "degree", syn.degree, "topology.synthetic");
      if (s.contains("region")) syn.region = read_region(s["region"], "topology.synthetic.region");
      c.topology.synthetic = syn;
    }
  }
  read(doc, "k", c.k, "config");

  if (doc.contains("noise")) {
    const auto& n = doc["noise"];
    allow_keys(n, "noise", {"stochastic_mean_ms", "per_hop_jitter_ms", "seed", "probes",
                            "traces_per_protocol", "protocols"});
    read(n, "stochastic_mean_ms", c.noise.stochastic_mean_ms, "noise");
    read(n, "per_hop_jitter_ms", c.noise.per_hop_jitter_ms, "noise");
    read(n, "seed", c.noise.seed, "noise");
    read(n, "probes", c.noise.probes, "noise");
    read(n, "traces_per_protocol", c.noise.traces_per_protocol, "noise");
    if (n.contains("protocols")) {
      if (!n["protocols"].is_array()) fail("noise.protocols must be an array");
      c.noise.protocols.clear();
      for (const auto& p : n["protocols"]) {
        allow_keys(p, "noise.protocols[]", {"name", "offset", "probability"});
        ProtocolBehaviour b;
        read(p, "name", b.name, "noise.protocols[]");
        read(p, "offset", b.offset, "noise.protocols[]");
        read(p, "probability", b.probability, "noise.protocols[]");
        c.noise.protocols.push_back(b);
      }
    }
  }

  if (doc.contains("simulation")) {
    const auto& s = doc["simulation"];
    allow_keys(s, "simulation", {"attach_radius_km", "last_mile_ms", "route_via_attachment",
                                 "target_unresponsive"});
    read(s, "attach_radius_km", c.simulation.attach_radius_km, "simulation");
    read(s, "last_mile_ms", c.simulation.last_mile_ms, "simulation");
    read(s, "route_via_attachment", c.simulation.route_via_attachment, "simulation");
    read(s, "target_unresponsive", c.simulation.target_unresponsive, "simulation");
  }

  if (doc.contains("provider")) {
    const auto& p = doc["provider"];
    allow_keys(p, "provider", {"mode", "detour_factor", "base_url", "timeout_ms", "cache_path"});
    std::string mode = "offline-detour";
    read(p, "mode", mode, "provider");
    if (mode == "offline-detour") {
      c.provider.mode = ProviderMode::OfflineDetour;
    } else if (mode == "http") {
      c.provider.mode = ProviderMode::Http;
    } else {
      fail("provider.mode must be 'offline-detour' or 'http'");
    }
    read(p, "detour_factor", c.provider.detour_factor, "provider");
    read(p, "base_url", c.provider.base_url, "provider");
    read(p, "timeout_ms", c.provider.timeout_ms, "provider");
    if (p.contains("cache_path")) {
      std::string cp;
      read(p, "cache_path", cp, "provider");
      c.provider.cache_path = resolve(base_dir, cp);
    }
  }

  if (doc.contains("estimator")) {
    const auto& e = doc["estimator"];
    allow_keys(e, "estimator", {"eps", "e_min", "shrink_cap", "self_tune", "contained"});
    read(e, "eps", c.estimator.eps, "estimator");
    read(e, "e_min", c.estimator.e_min, "estimator");
    read(e, "shrink_cap", c.estimator.shrink_cap, "estimator");
    read(e, "self_tune", c.estimator.self_tune, "estimator");
    if (e.contains("contained")) {
      std::string policy;
      read(e, "contained", policy, "estimator");
      c.estimator.contained = parse_policy(policy);
    }
  }

  if (doc.contains("targets")) {
    const auto& t = doc["targets"];
    allow_keys(t, "targets", {"count", "region", "seed"});
    read(t, "count", c.targets.count, "targets");
    read(t, "seed", c.targets.seed, "targets");
    if (t.contains("region")) c.targets.region = read_region(t["region"], "targets.region");
  }

  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    allow_keys(e, "eval", {"compare_k", "baseline", "threads"});
    read(e, "compare_k", c.eval.compare_k, "eval");
    read(e, "baseline", c.eval.baseline, "eval");
    read(e, "threads", c.eval.threads, "eval");
  }

  if (doc.contains("out")) {
    std::string out;
    read(doc, "out", out, "config");
    c.out = resolve(base_dir, out);
  } else {
    c.out = base_dir / "out";
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(e.what());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

void validate(const PipelineConfig& c) {
  if (c.k < 2) fail("k must be at least 2");
  for (const int k : c.eval.compare_k) {
    if (k < 2) fail("eval.compare_k entries must be at least 2");
  }
  if (!(c.estimator.e_min > 0.0)) fail("estimator.e_min must be positive");
  if (!(c.estimator.eps > 0.0)) fail("estimator.eps must be positive");
  if (c.estimator.shrink_cap < 0) fail("estimator.shrink_cap must be non-negative");
  if (c.targets.count < 0) fail("targets.count must be non-negative");
  if (c.eval.threads < 0) fail("eval.threads must be non-negative");
  try {
    c.noise.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (c.topology.path) {
    if (!std::filesystem::is_regular_file(*c.topology.path)) {
      fail("topology file not found: " + c.topology.path->string());
    }
  } else if (!c.topology.synthetic) {
    fail("topology needs either 'path' or 'synthetic'");
  } else if (c.topology.synthetic->nodes < 1) {
    fail("topology.synthetic.nodes must be positive");
  }
  if (!(c.simulation.attach_radius_km > 0.0)) fail("simulation.attach_radius_km must be positive");
  if (!(c.simulation.last_mile_ms >= 0.0)) fail("simulation.last_mile_ms must be non-negative");
  if (c.provider.detour_factor < 1.0) fail("provider.detour_factor must be >= 1");
  if (c.provider.mode == ProviderMode::Http && c.provider.base_url.empty()) {
    fail("provider.base_url is required for mode 'http'");
  }
  if (c.provider.timeout_ms <= 0) fail("provider.timeout_ms must be positive");
}

std::string config_to_json(const PipelineConfig& c) {
  ordered_json doc;
  ordered_json topo = ordered_json::object();
  if (c.topology.path) topo["path"] = c.topology.path->string();
  topo["format"] = c.topology.format == TopologyFormat::Json ? "json" : "graphml";
  if (c.topology.synthetic) {
    const auto& s = *c.topology.synthetic;
    topo["synthetic"] = {{"nodes", s.nodes},
                         {"region", region_json(s.region)},
                         {"seed", s.seed},
                         {"degree", s.degree}};
  }
  doc["topology"] = topo;
  doc["k"] = c.k;
  ordered_json protocols = ordered_json::array();
  for (const auto& p : c.noise.protocols) {
    protocols.push_back({{"name", p.name}, {"offset", p.offset}, {"probability", p.probability}});
  }
  doc["noise"] = {{"stochastic_mean_ms", c.noise.stochastic_mean_ms},
                  {"per_hop_jitter_ms", c.noise.per_hop_jitter_ms},
                  {"seed", c.noise.seed},
                  {"probes", c.noise.probes},
                  {"traces_per_protocol", c.noise.traces_per_protocol},
                  {"protocols", protocols}};
  doc["simulation"] = {{"attach_radius_km", c.simulation.attach_radius_km},
                       {"last_mile_ms", c.simulation.last_mile_ms},
                       {"route_via_attachment", c.simulation.route_via_attachment},
                       {"target_unresponsive", c.simulation.target_unresponsive}};
  ordered_json provider{
      {"mode", c.provider.mode == ProviderMode::Http ? "http" : "offline-detour"},
      {"detour_factor", c.provider.detour_factor},
      {"base_url", c.provider.base_url},
      {"timeout_ms", c.provider.timeout_ms}};
  if (c.provider.cache_path) provider["cache_path"] = c.provider.cache_path->string();
  doc["provider"] = provider;
  doc["estimator"] = {{"eps", c.estimator.eps},
                      {"e_min", c.estimator.e_min},
                      {"shrink_cap", c.estimator.shrink_cap},
                      {"self_tune", c.estimator.self_tune},
                      {"contained", c.estimator.contained == ContainedPolicy::Drop ? "drop" : "adjust"}};
  ordered_json targets{{"count", c.targets.count}, {"seed", c.targets.seed}};
  if (c.targets.region) targets["region"] = region_json(*c.targets.region);
  doc["targets"] = targets;
  doc["eval"] = {{"compare_k", c.eval.compare_k}, {"baseline", c.eval.baseline}, {"threads", c.eval.threads}};
  doc["out"] = c.out.string();
  return doc.dump(2) + "\n";
}

}  // namespace geoloc::cli
