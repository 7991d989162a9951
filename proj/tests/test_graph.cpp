#include <doctest.h>

#include <random>

#include "chatlens/error.hpp"
#include "chatlens/graph.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace chatlens;
using chatlens::testing::text_message;
using doctest::Approx;

namespace {

graph::SimpleGraph path(std::size_t n) {
  graph::SimpleGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("p" + std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) g.add_edge(i - 1, i);
  return g;
}

}  // namespace

TEST_CASE("simple graph ignores loops and parallel edges") {
  graph::SimpleGraph g({"a", "b", "c"});
  CHECK(g.add_edge(0, 1));
  CHECK_FALSE(g.add_edge(1, 0));
  CHECK_FALSE(g.add_edge(2, 2));
  CHECK(g.edge_count() == 1);
  CHECK(g.find("c") == 2u);
  CHECK_FALSE(g.find("d"));
  CHECK(g.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});
}

TEST_CASE("path graph metrics") {
  auto g = path(4);
  CHECK(graph::diameter(g) == 3);
  CHECK(graph::eccentricity(g, 1) == 2);
  CHECK(graph::avg_shortest_path(g, 0) == Approx(2.0));
  CHECK(graph::avg_shortest_path(g, 1) == Approx(4.0 / 3));
  CHECK_THROWS_AS(graph::clustering_coefficient(g, 0), UndefinedError);
  CHECK(graph::clustering_coefficient(g, 1) == 0.0);
}

TEST_CASE("triangle plus pendant") {
  graph::SimpleGraph g({"a", "b", "c", "d"});
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  g.add_edge(2, 3);
  CHECK(graph::clustering_coefficient(g, 0) == 1.0);
  CHECK(graph::clustering_coefficient(g, 2) == Approx(1.0 / 3));
  auto rows = graph::node_metrics(g);
  CHECK_FALSE(rows[3].clustering);
  CHECK(rows[3].avg_path == Approx(5.0 / 3));
}

TEST_CASE("components are ordered by size and singletons have no path length") {
  graph::SimpleGraph g({"a", "b", "c", "d", "e"});
  g.add_edge(3, 4);
  g.add_edge(2, 3);
  auto comps = graph::connected_components(g);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<std::size_t>{2, 3, 4});
  CHECK(comps[1] == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(graph::avg_shortest_path(g, 0), UndefinedError);
  CHECK(graph::bfs_distances(g, 2)[0] == graph::kUnreachable);
  CHECK(graph::diameter(graph::SimpleGraph({"x", "y"})) == 0);
}

TEST_CASE("bfs metrics agree with floyd-warshall and triangle enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 25;
    auto g = oracle::random_graph(rng, n, 0.15);
    auto d = oracle::floyd_warshall(g);
    for (std::size_t v = 0; v < n; ++v) {
      auto bfs = graph::bfs_distances(g, v);
      for (std::size_t w = 0; w < n; ++w) {
        CHECK(bfs[w] == (d[v][w] == oracle::kInf ? graph::kUnreachable : d[v][w]));
      }
      if (g.degree(v) >= 2) {
        const double k = static_cast<double>(g.degree(v));
        CHECK(graph::clustering_coefficient(g, v) == static_cast<double>(oracle::triangles_at(g, v)) / (k * (k - 1) / 2));
      }
    }
  }
}

TEST_CASE("group and user graphs from shared members") {
  auto c = chatlens::testing::corpus_of({
      text_message("1", "g1", "+573001111111", "2020-03-01T10:00Z", "a"),
      text_message("2", "g1", "+584121111111", "2020-03-01T10:01Z", "b"),
      text_message("3", "g2", "+584121111111", "2020-03-01T10:02Z", "c"),
      text_message("4", "g3", "+593991111111", "2020-03-01T10:03Z", "d"),
  });
  auto groups = graph::build_group_graph(c);
  CHECK(groups.node_count() == 3);
  CHECK(groups.edge_count() == 1);
  CHECK(groups.has_edge(*groups.find("g1"), *groups.find("g2")));
  auto users = graph::build_user_graph(c);
  CHECK(users.node_count() == 3);
  CHECK(users.edge_count() == 1);
}

TEST_CASE("nearest-rank percentiles and classes") {
  std::vector<double> v{10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
  CHECK(graph::nearest_rank_percentile(v, 30) == 3);
  CHECK(graph::nearest_rank_percentile(v, 70) == 7);
  CHECK(graph::nearest_rank_percentile(v, 100) == 10);
  CHECK(graph::nearest_rank_percentile(v, 0) == 1);
  auto cls = graph::percentile_classes(v);
  CHECK(cls[1] == graph::PercentileClass::Low);    // 1
  CHECK(cls[5] == graph::PercentileClass::Low);    // 3
  CHECK(cls[7] == graph::PercentileClass::Mid);    // 4
  CHECK(cls[6] == graph::PercentileClass::Mid);    // 7
  CHECK(cls[4] == graph::PercentileClass::High);   // 8
  CHECK(graph::to_string(graph::PercentileClass::High) == "HIGH");
}
