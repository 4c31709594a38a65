#include "geoloc/topology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "geoloc/error.hpp"

namespace geoloc {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

struct RawNode {
  NodeId id;
  std::optional<double> lat;
  std::optional<double> lon;
  std::string label;
};

Topology build(std::vector<RawNode> raw, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<std::string> missing;
  std::vector<Node> nodes;
  nodes.reserve(raw.size());
  for (auto& r : raw) {
    if (!r.lat || !r.lon) {
      missing.push_back(r.id);
      continue;
    }
    nodes.push_back(Node{std::move(r.id), make_geo_point(*r.lat, *r.lon), std::move(r.label)});
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::ValidationError, "nodes missing coordinates: " + join(missing));
  }
  return Topology(std::move(nodes), edges);
}

}  // namespace

Topology::Topology(std::vector<Node> nodes, const std::vector<std::pair<NodeId, NodeId>>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].position.lon == -180.0) nodes_[i].position.lon = 180.0;
    if (!is_valid(nodes_[i].position)) {
      throw Error(ErrorCode::ValidationError, "node '" + nodes_[i].id + "' has invalid coordinates");
    }
    if (i > 0 && nodes_[i].id == nodes_[i - 1].id) {
      throw Error(ErrorCode::ValidationError, "duplicate node id '" + nodes_[i].id + "'");
    }
  }

  std::set<Edge> unique;
  for (const auto& [a, b] : edges) {
    const auto ia = find(a);
    const auto ib = find(b);
    if (!ia) throw Error(ErrorCode::ValidationError, "edge references unknown node '" + a + "'");
    if (!ib) throw Error(ErrorCode::ValidationError, "edge references unknown node '" + b + "'");
    if (*ia == *ib) throw Error(ErrorCode::ValidationError, "self-loop on node '" + a + "'");
    unique.insert(std::minmax(*ia, *ib));
  }
  edges_.assign(unique.begin(), unique.end());

  adjacency_.assign(nodes_.size(), {});
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<std::size_t> Topology::find(std::string_view id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::string_view v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t Topology::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::UnknownNode, "no node with id '" + std::string(id) + "'");
}

bool Topology::connected() const {
  if (nodes_.empty()) return true;
  const auto dist = hop_distances_from(*this, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

TopologyFormat parse_topology_format(std::string_view name) {
  if (name == "json") return TopologyFormat::Json;
  if (name == "graphml" || name == "graphml-subset") return TopologyFormat::GraphML;
  throw Error(ErrorCode::ParseError, "unknown topology format '" + std::string(name) + "'");
}

Topology parse_topology_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw Error(ErrorCode::ParseError, "topology JSON needs a 'nodes' array");
  }

  std::vector<RawNode> raw;
  std::vector<std::pair<NodeId, NodeId>> edges;
  try {
    for (const auto& n : doc["nodes"]) {
      RawNode r;
      r.id = n.at("id").get<std::string>();
      if (n.contains("lat") && !n["lat"].is_null()) r.lat = n["lat"].get<double>();
      if (n.contains("lon") && !n["lon"].is_null()) r.lon = n["lon"].get<double>();
      if (n.contains("label")) r.label = n["label"].get<std::string>();
      raw.push_back(std::move(r));
    }
    if (doc.contains("edges")) {
      for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2) {
          throw Error(ErrorCode::ParseError, "edge must be a two-element array");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return build(std::move(raw), edges);
}

Topology parse_topology_graphml(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  const auto root = tree.get_child_optional("graphml");
  if (!root) throw Error(ErrorCode::ParseError, "missing <graphml> root element");

  // Map data-key ids (e.g. "d29") to the attribute they carry.
  std::unordered_map<std::string, std::string> key_names;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    const auto id = child.get_optional<std::string>("<xmlattr>.id");
    const auto name =
        child.get_optional<std::string>(pt::ptree::path_type("<xmlattr>/attr.name", '/'));
    if (id && name) key_names[*id] = *name;
  }

  const auto graph = root->get_child_optional("graph");
  if (!graph) throw Error(ErrorCode::ParseError, "missing <graph> element");

  std::vector<RawNode> raw;
  std::vector<std::pair<NodeId, NodeId>> edges;
  try {
    for (const auto& [tag, child] : *graph) {
      if (tag == "node") {
        RawNode r;
        r.id = child.get<std::string>("<xmlattr>.id");
        for (const auto& [dtag, data] : child) {
          if (dtag != "data") continue;
          const auto key = data.get<std::string>("<xmlattr>.key", "");
          const auto it = key_names.find(key);
          const std::string& name = it == key_names.end() ? key : it->second;
          if (name == "Latitude") r.lat = data.get_value<double>();
          if (name == "Longitude") r.lon = data.get_value<double>();
        }
        raw.push_back(std::move(r));
      } else if (tag == "edge") {
        edges.emplace_back(child.get<std::string>("<xmlattr>.source"),
                           child.get<std::string>("<xmlattr>.target"));
      }
    }
  } catch (const pt::ptree_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return build(std::move(raw), edges);
}

Topology load_topology(const std::filesystem::path& path, TopologyFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open topology file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return format == TopologyFormat::Json ? parse_topology_json(buf.str())
                                        : parse_topology_graphml(buf.str());
}

std::vector<int> hop_distances_from(const Topology& t, std::size_t source) {
  std::vector<int> dist(t.size(), kUnreachable);
  std::deque<std::size_t> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto v : t.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

HopDistanceTable hop_distances(const Topology& t, std::string_view source) {
  const auto s = t.index_of(source);
  const auto dist = hop_distances_from(t, s);
  HopDistanceTable table{std::string(source), {}};
  for (std::size_t i = 0; i < t.size(); ++i) table.dist.emplace(t.node(i).id, dist[i]);
  return table;
}

int eccentricity(const Topology& t, std::string_view node) {
  const auto dist = hop_distances_from(t, t.index_of(node));
  int ecc = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] == kUnreachable) {
      throw Error(ErrorCode::DisconnectedGraph,
                  "node '" + t.node(i).id + "' unreachable from '" + std::string(node) + "'");
    }
    ecc = std::max(ecc, dist[i]);
  }
  return ecc;
}

std::vector<std::size_t> hop_path(const Topology& t, std::size_t from, std::size_t to) {
  // BFS from the destination; walking forward we always step to the
  // smallest-index neighbor that is one hop closer.
  const auto dist = hop_distances_from(t, to);
  if (dist.at(from) == kUnreachable) return {};
  std::vector<std::size_t> path{from};
  auto cur = from;
  while (cur != to) {
    for (const auto v : t.neighbors(cur)) {
      if (dist[v] == dist[cur] - 1) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

HopMatrix::HopMatrix(const Topology& t) : n_(t.size()), data_(n_ * n_, kUnreachable) {
  for (std::size_t s = 0; s < n_; ++s) {
    const auto row = hop_distances_from(t, s);
    std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(s * n_));
    if (std::find(row.begin(), row.end(), kUnreachable) != row.end()) connected_ = false;
  }
}

std::size_t nearest_node(const Topology& t, const GeoPoint& p) {
  if (t.empty()) throw Error(ErrorCode::ValidationError, "empty topology");
  std::size_t best = 0;
  double best_km = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = orthodromic_distance(p, t.node(i).position).km();
    if (d < best_km) {
      best_km = d;
      best = i;
    }
  }
  return best;
}

}  // namespace geoloc
