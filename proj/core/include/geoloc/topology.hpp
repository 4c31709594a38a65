#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geoloc/geo.hpp"

namespace geoloc {

using NodeId = std::string;

struct Node {
  NodeId id;
  GeoPoint position;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

// Undirected, unweighted network graph with geographic node positions.
//
// Nodes are stored sorted by id, so a node's index order equals the
// lexicographic order of ids. Every algorithm that breaks ties "by smallest
// id" can therefore compare indices. Edges are de-duplicated and stored as
// (lower index, higher index) pairs.
class Topology {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Topology() = default;
  // Throws Error(ValidationError) on duplicate ids, self-loops, dangling
  // edge endpoints or invalid coordinates.
  Topology(std::vector<Node> nodes, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t index) const { return nodes_.at(index); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_.at(index); }

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws Error(UnknownNode).
  std::size_t index_of(std::string_view id) const;

  bool connected() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

enum class TopologyFormat { Json, GraphML };

// Throws Error(ParseError) for unknown names.
TopologyFormat parse_topology_format(std::string_view name);

// JSON: {"nodes":[{"id":str,"lat":num,"lon":num,"label":str?}],"edges":[[str,str]]}
Topology parse_topology_json(std::string_view text);
// GraphML subset: <node id> with Latitude/Longitude <data> keys and
// <edge source target>. Everything else is ignored.
Topology parse_topology_graphml(std::string_view text);
Topology load_topology(const std::filesystem::path& path, TopologyFormat format);

inline constexpr int kUnreachable = -1;

struct HopDistanceTable {
  NodeId source;
  std::map<NodeId, int> dist;  // kUnreachable for nodes in other components
};

// Breadth-first hop counts from one node, indexed like Topology::nodes().
std::vector<int> hop_distances_from(const Topology& t, std::size_t source);

HopDistanceTable hop_distances(const Topology& t, std::string_view source);

// Throws Error(DisconnectedGraph) if some node is unreachable.
int eccentricity(const Topology& t, std::string_view node);

// A shortest hop path from `from` to `to`, inclusive of both ends. Among
// equal-length paths, the one whose predecessor chain has the smallest ids
// wins. Empty if unreachable.
std::vector<std::size_t> hop_path(const Topology& t, std::size_t from, std::size_t to);

// All-pairs hop matrix (row-major, n*n), kUnreachable where disconnected.
class HopMatrix {
 public:
  explicit HopMatrix(const Topology& t);

  std::size_t size() const noexcept { return n_; }
  int operator()(std::size_t from, std::size_t to) const noexcept { return data_[from * n_ + to]; }
  std::span<const int> row(std::size_t from) const noexcept {
    return {data_.data() + from * n_, n_};
  }
  bool connected() const noexcept { return connected_; }

 private:
  std::size_t n_ = 0;
  std::vector<int> data_;
  bool connected_ = true;
};

std::size_t nearest_node(const Topology& t, const GeoPoint& p);

}  // namespace geoloc
