#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "geoloc/error.hpp"
#include "geoloc/topology.hpp"
#include "oracles.hpp"

using namespace geoloc;

namespace {

const std::string kFixtures = GEOLOC_FIXTURE_DIR;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no geoloc::Error thrown";
  return ErrorCode::ParseError;
}

Topology named(std::vector<std::string> ids, std::vector<std::pair<std::string, std::string>> edges) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < ids.size(); ++i) nodes.push_back({ids[i], {0.0, static_cast<double>(i)}, ""});
  return Topology(nodes, edges);
}

}  // namespace

TEST(Topology, LoadsTriangleFixture) {
  const auto t = load_topology(kFixtures + "/triangle.json", TopologyFormat::Json);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.edges().size(), 3u);
  EXPECT_EQ(t.node(t.index_of("a")).label, "Alpha");
  EXPECT_DOUBLE_EQ(t.node(t.index_of("c")).position.lat, 1.0);
  EXPECT_TRUE(t.connected());
}

TEST(Topology, DanglingEdgeNamesTheId) {
  try {
    load_topology(kFixtures + "/dangling_edge.json", TopologyFormat::Json);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Topology, MissingCoordinatesAreListed) {
  try {
    load_topology(kFixtures + "/missing_coords.json", TopologyFormat::Json);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    const std::string msg = e.what();
    EXPECT_NE(msg.find('b'), std::string::npos);
    EXPECT_NE(msg.find("c"), std::string::npos);
  }
}

TEST(Topology, GraphMlMatchesJson) {
  const auto from_json = load_topology(kFixtures + "/five.json", TopologyFormat::Json);
  const auto from_graphml = load_topology(kFixtures + "/five.graphml", TopologyFormat::GraphML);
  EXPECT_EQ(from_json.size(), 5u);
  EXPECT_EQ(from_json, from_graphml);
}

TEST(Topology, RejectsMalformedInput) {
  EXPECT_EQ(code_of([] { parse_topology_json("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_topology_graphml("<graphml><graph>"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_topology_format("csv"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { load_topology("/nonexistent/topology.json", TopologyFormat::Json); }),
            ErrorCode::IoError);
  EXPECT_EQ(code_of([] { named({"a", "a"}, {}); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { named({"a"}, {{"a", "a"}}); }), ErrorCode::ValidationError);
}

TEST(Topology, DuplicateEdgesCollapse) {
  const auto t = named({"a", "b"}, {{"a", "b"}, {"b", "a"}, {"a", "b"}});
  EXPECT_EQ(t.edges().size(), 1u);
}

TEST(Topology, NodesSortedById) {
  const auto t = named({"c", "a", "b"}, {{"a", "c"}});
  EXPECT_EQ(t.node(0).id, "a");
  EXPECT_EQ(t.node(2).id, "c");
  EXPECT_EQ(t.index_of("b"), 1u);
  EXPECT_EQ(code_of([&] { t.index_of("zz"); }), ErrorCode::UnknownNode);
}

TEST(HopDistances, PathGraph) {
  const auto t = named({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  const auto table = hop_distances(t, "a");
  EXPECT_EQ(table.source, "a");
  EXPECT_EQ(table.dist.at("a"), 0);
  EXPECT_EQ(table.dist.at("b"), 1);
  EXPECT_EQ(table.dist.at("c"), 2);
}

TEST(HopDistances, DisconnectedNodeIsUnreachable) {
  const auto t = named({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(hop_distances(t, "a").dist.at("d"), kUnreachable);
  EXPECT_FALSE(t.connected());
  EXPECT_FALSE(HopMatrix(t).connected());
}

TEST(HopDistances, UnknownSource) {
  const auto t = named({"a"}, {});
  EXPECT_EQ(code_of([&] { hop_distances(t, "x"); }), ErrorCode::UnknownNode);
}

TEST(HopDistances, FourCycleOppositeAtTwo) {
  const auto t = oracle::cycle_graph(4).to_topology();
  const auto fw = oracle::floyd_warshall(oracle::cycle_graph(4));
  for (std::size_t s = 0; s < 4; ++s) {
    const auto d = hop_distances_from(t, s);
    EXPECT_EQ(d[(s + 2) % 4], 2);
    for (std::size_t v = 0; v < 4; ++v) EXPECT_EQ(d[v], fw[s][v]);
  }
}

TEST(Eccentricity, PathAndStar) {
  const auto path = named({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(eccentricity(path, "b"), 1);
  EXPECT_EQ(eccentricity(path, "a"), 2);

  const auto star = named({"hub", "l1", "l2", "l3", "l4", "l5"},
                          {{"hub", "l1"}, {"hub", "l2"}, {"hub", "l3"}, {"hub", "l4"}, {"hub", "l5"}});
  const auto fw = oracle::floyd_warshall(oracle::Graph{6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}});
  EXPECT_EQ(eccentricity(star, "hub"), 1);
  for (const char* leaf : {"l1", "l2", "l3", "l4", "l5"}) {
    EXPECT_EQ(eccentricity(star, leaf), 2);
    const int i = leaf[1] - '0';
    EXPECT_EQ(eccentricity(star, leaf), *std::max_element(fw[i].begin(), fw[i].end()));
  }
}

TEST(Eccentricity, DisconnectedGraphThrows) {
  const auto t = named({"a", "b"}, {});
  EXPECT_EQ(code_of([&] { eccentricity(t, "a"); }), ErrorCode::DisconnectedGraph);
}

TEST(HopDistancesProperty, AgreesWithFloydWarshall) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<int> size(2, 50);
    std::uniform_real_distribution<double> density(0.0, 0.15);
    auto g = oracle::random_connected_graph(rng, size(rng), density(rng));
    // Some trials drop edges to exercise unreachable entries.
    if (trial % 4 == 0 && g.edges.size() > 2) g.edges.resize(g.edges.size() / 2);
    const auto t = g.to_topology();
    const auto fw = oracle::floyd_warshall(g);
    const HopMatrix matrix(t);
    for (int s = 0; s < g.n; ++s) {
      const auto d = hop_distances_from(t, static_cast<std::size_t>(s));
      for (int v = 0; v < g.n; ++v) {
        const int expected = fw[s][v] >= oracle::kInf ? kUnreachable : fw[s][v];
        ASSERT_EQ(d[v], expected);
        ASSERT_EQ(matrix(s, v), expected);
      }
    }
  }
}

TEST(HopDistancesProperty, EdgesDifferByAtMostOne) {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 30, 0.08);
    const auto t = g.to_topology();
    for (std::size_t s = 0; s < t.size(); s += 7) {
      const auto d = hop_distances_from(t, s);
      for (const auto& [u, v] : t.edges()) EXPECT_LE(std::abs(d[u] - d[v]), 1);
    }
  }
}

TEST(HopPath, ShortestAndConnected) {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 25, 0.1);
    const auto t = g.to_topology();
    const auto fw = oracle::floyd_warshall(g);
    for (std::size_t a = 0; a < t.size(); a += 5) {
      for (std::size_t b = 0; b < t.size(); b += 3) {
        const auto path = hop_path(t, a, b);
        ASSERT_EQ(static_cast<int>(path.size()) - 1, fw[a][b]);
        EXPECT_EQ(path.front(), a);
        EXPECT_EQ(path.back(), b);
        for (std::size_t i = 1; i < path.size(); ++i) {
          const auto nb = t.neighbors(path[i - 1]);
          EXPECT_NE(std::find(nb.begin(), nb.end(), path[i]), nb.end());
        }
      }
    }
  }
}

TEST(NearestNode, PicksClosestByGreatCircle) {
  const auto t = load_topology(kFixtures + "/five.json", TopologyFormat::Json);
  EXPECT_EQ(t.node(nearest_node(t, {52.4, 13.1})).id, "n0");
  EXPECT_EQ(t.node(nearest_node(t, {50.9, 7.0})).id, "n4");
}
