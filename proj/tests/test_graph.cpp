#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "rgl/errors.hpp"
#include "rgl/graph.hpp"
#include "rgl/rng.hpp"

using namespace rgl;

namespace {

DirectedGraph chain3() { return DirectedGraph(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST_CASE("constructor enforces graph invariants") {
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(DirectedGraph(2, {}, std::vector<std::uint32_t>{0}), std::invalid_argument);

  const DirectedGraph g(3, {{2, 0}, {0, 2}, {0, 1}});
  CHECK(g.edges() == EdgeList{{0, 1}, {0, 2}, {2, 0}});
  CHECK(g.out_degree(0) == 2);
  CHECK(g.predecessors(0).size() == 1);
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 0));
}

TEST_CASE("generate_er boundary probabilities") {
  CHECK(generate_er(3, 0.0, 17).edge_count() == 0);
  const auto full = generate_er(3, 1.0, 17);
  CHECK(full.edge_count() == 6);
  for (NodeId u = 0; u < 3; ++u)
    for (NodeId v = 0; v < 3; ++v) CHECK(full.has_edge(u, v) == (u != v));

  const auto g = generate_er(10, 0.4, 2024);
  CHECK(g.node_count() == 10);
  CHECK(g.seed() == 2024);

  CHECK_THROWS_AS(generate_er(0, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_er(4, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_er(4, -0.1, 1), std::invalid_argument);
}

TEST_CASE("generation is deterministic and seed sensitive") {
  CHECK(generate_er(40, 0.2, 9) == generate_er(40, 0.2, 9));
  CHECK(generate_er(40, 0.2, 9).edges() != generate_er(40, 0.2, 10).edges());
  CHECK(generate_sbm(40, 4, 0.3, 0.05, 3) == generate_sbm(40, 4, 0.3, 0.05, 3));

  // Serialized form is stable too.
  std::ostringstream a, b;
  write_graph(a, generate_er(12, 0.3, 77));
  write_graph(b, generate_er(12, 0.3, 77));
  CHECK(a.str() == b.str());
}

TEST_CASE("generate_sbm structure") {
  const auto complete = generate_sbm(4, 1, 1.0, 0.0, 5);
  CHECK(complete.edge_count() == 12);

  const auto parts = generate_sbm(6, 3, 1.0, 0.0, 5);
  CHECK(parts.edges() == EdgeList{{0, 1}, {1, 0}, {2, 3}, {3, 2}, {4, 5}, {5, 4}});
  CHECK(*parts.community() == std::vector<std::uint32_t>{0, 0, 1, 1, 2, 2});

  const auto uneven = generate_sbm(10, 3, 0.5, 0.1, 1);
  CHECK(*uneven.community() == std::vector<std::uint32_t>{0, 0, 0, 0, 1, 1, 1, 2, 2, 2});

  CHECK_THROWS_AS(generate_sbm(3, 4, 0.5, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_sbm(3, 0, 0.5, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_sbm(3, 1, 0.5, 2.0, 1), std::invalid_argument);

  const auto big = generate_sbm(1000, 10, 0.1, 0.01, 42);
  CHECK(big.node_count() == 1000);
  std::size_t intra = 0;
  for (const auto& e : big.edges()) intra += (*big.community())[e.from] == (*big.community())[e.to];
  const double expected_intra = 10 * 100 * 99 * 0.1;
  const double expected_inter = 1000.0 * 900 * 0.01;
  CHECK(std::abs(static_cast<double>(intra) - expected_intra) < 5 * std::sqrt(expected_intra));
  CHECK(std::abs(static_cast<double>(big.edge_count() - intra) - expected_inter) < 5 * std::sqrt(expected_inter));
}

TEST_CASE("one-community SBM reproduces ER for the same seed") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(generate_sbm(15, 1, 0.3, 0.9, seed).edges() == generate_er(15, 0.3, seed).edges());
  }
}

TEST_CASE("one-community SBM and ER edge counts agree statistically") {
  const std::size_t n = 20;
  const double p = 0.25;
  const double pairs = n * (n - 1);
  const double mean = pairs * p;
  const double sigma_mean = std::sqrt(pairs * p * (1 - p) / 200.0);
  double er_total = 0, sbm_total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    er_total += static_cast<double>(generate_er(n, p, seed).edge_count());
    sbm_total += static_cast<double>(generate_sbm(n, 1, p, 0.0, seed + 100000).edge_count());
  }
  CHECK(std::abs(er_total / 200 - mean) < 3 * sigma_mean);
  CHECK(std::abs(sbm_total / 200 - mean) < 3 * sigma_mean);
}

TEST_CASE("degree_profile") {
  const auto two = degree_profile(DirectedGraph(2, {{0, 1}}));
  CHECK(two.out_degree == std::vector<std::size_t>{1, 0});
  CHECK(two.zscore[0] == doctest::Approx(1.0));
  CHECK(two.zscore[1] == doctest::Approx(-1.0));

  for (double z : degree_profile(generate_er(3, 1.0, 0)).zscore) CHECK(z == 0.0);
  CHECK(degree_profile(DirectedGraph(1, {})).zscore == std::vector<double>{0.0});

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto prof = degree_profile(generate_er(25, 0.2, seed));
    const double sum = std::accumulate(prof.zscore.begin(), prof.zscore.end(), 0.0);
    double sq = 0;
    for (double z : prof.zscore) sq += z * z;
    if (sq == 0) continue;
    CHECK(std::abs(sum) < 1e-9);
    CHECK(sq / 25 == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("hop_distance examples") {
  const auto g = chain3();
  CHECK(hop_distance(g, 0, 2) == 2u);
  CHECK(hop_distance(g, 0, 0) == 0u);
  CHECK_FALSE(hop_distance(g, 2, 0).has_value());
  CHECK_THROWS_AS(hop_distance(g, 0, 3), std::out_of_range);
}

TEST_CASE("hop_distance matches Floyd-Warshall and obeys the triangle inequality") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = generate_er(2 + seed % 7, 0.3, seed);
    const auto d = oracle::all_pairs_distance(g);
    const std::size_t n = g.node_count();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        const auto h = hop_distance(g, u, v);
        CHECK(h.value_or(SIZE_MAX) == d[u][v]);
        for (NodeId w = 0; w < n; ++w) {
          if (d[u][v] == SIZE_MAX || d[v][w] == SIZE_MAX) continue;
          CHECK(d[u][w] <= d[u][v] + d[v][w]);
          CHECK(*hop_distance(g, u, w) <= *hop_distance(g, u, v) + *hop_distance(g, v, w));
        }
      }
    }
  }
}

TEST_CASE("triangle inequality on every 4-node digraph") {
  for (std::uint64_t mask = 0; mask < oracle::digraph_count(4); ++mask) {
    const auto g = oracle::digraph_from_mask(4, mask);
    std::vector<std::vector<std::size_t>> d(4);
    for (NodeId u = 0; u < 4; ++u) d[u] = bfs_distances(g, u);
    for (NodeId u = 0; u < 4; ++u)
      for (NodeId v = 0; v < 4; ++v)
        for (NodeId w = 0; w < 4; ++w) {
          if (d[u][v] == kUnreachable || d[v][w] == kUnreachable) continue;
          REQUIRE(d[u][w] <= d[u][v] + d[v][w]);
        }
  }
}

TEST_CASE("reachable_pairs") {
  using P = std::vector<std::pair<NodeId, NodeId>>;
  CHECK(reachable_pairs(chain3()) == P{{0, 1}, {0, 2}, {1, 2}});
  CHECK(reachable_pairs(DirectedGraph(3, {})).empty());
  CHECK(reachable_pairs(DirectedGraph(2, {{0, 1}, {1, 0}})) == P{{0, 1}, {1, 0}});

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = generate_er(9, 0.15, seed);
    const auto d = oracle::all_pairs_distance(g);
    P expected;
    for (NodeId u = 0; u < 9; ++u)
      for (NodeId v = 0; v < 9; ++v)
        if (u != v && d[u][v] != SIZE_MAX) expected.emplace_back(u, v);
    CHECK(reachable_pairs(g) == expected);
  }
}

TEST_CASE("backward BFS gives distance to the origin") {
  const auto g = chain3();
  CHECK(bfs_distances(g, 2, Direction::backward) == std::vector<std::size_t>{2, 1, 0});
  CHECK(bfs_distances(g, 0, Direction::backward) == std::vector<std::size_t>{0, kUnreachable, kUnreachable});
}

TEST_CASE("graph text format round-trips") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = seed % 2 ? generate_sbm(17, 3, 0.4, 0.05, seed) : generate_er(13, 0.3, seed);
    std::stringstream buf;
    write_graph(buf, g);
    const auto back = parse_graph(buf);
    CHECK(back == g);
    std::ostringstream again;
    write_graph(again, back);
    CHECK(again.str() == buf.str());
  }
}

TEST_CASE("graph parser rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
  };
  CHECK(parse("graph 2 5\nedge 0 1\n").edge_count() == 1);
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("graph x 5\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\nedge 0 2\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\nedge 0 0\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\nedge 0 1\nedge 0 1\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\nvertex 0\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\ncommunity 0 0\n"), FormatError);
  CHECK_THROWS_AS(parse("graph 2 5\nedge 0 1 7\n"), FormatError);
}

TEST_CASE("rng helpers") {
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.bounded(7) < 7u);
  }
  std::vector<int> v{1, 2, 3, 4, 5, 6};
  r.shuffle(std::span<int>(v));
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5, 6});
}
