#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rgl/metrics.hpp"
#include "rgl/mixture.hpp"

using namespace rgl;

namespace {

DirectedGraph chain(std::size_t n) {
  EdgeList e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return DirectedGraph(n, e);
}

// s=0, a=1, v=2, m=3, u=4, b=5, t=6.
DirectedGraph bridge() {
  return DirectedGraph(7, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}});
}

}  // namespace

TEST_CASE("build_transition") {
  const auto c = build_transition(chain(3));
  CHECK(c.at(0, 1) == 1.0);
  CHECK(c.at(1, 2) == 1.0);
  for (NodeId y = 0; y < 3; ++y) CHECK(c.at(2, y) == 0.0);

  const auto fork = build_transition(DirectedGraph(3, {{0, 1}, {0, 2}}));
  CHECK(fork.at(0, 1) == 0.5);
  CHECK(fork.at(0, 2) == 0.5);

  const auto k3 = build_transition(generate_er(3, 1.0, 0));
  for (NodeId x = 0; x < 3; ++x)
    for (NodeId y = 0; y < 3; ++y) CHECK(k3.at(x, y) == (x == y ? 0.0 : 0.5));

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_er(12, 0.25, seed);
    const auto t = build_transition(g);
    for (NodeId x = 0; x < 12; ++x) {
      double sum = 0;
      for (double p : t.row(x)) {
        CHECK(p >= 0.0);
        sum += p;
      }
      if (g.out_degree(x) > 0) {
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      } else {
        CHECK(sum == 0.0);
      }
    }
  }
}

TEST_CASE("matrix powers agree with walk sums on every 4-node digraph") {
  for (std::uint64_t mask = 0; mask < oracle::digraph_count(4); ++mask) {
    const auto g = oracle::digraph_from_mask(4, mask);
    const TransitionPowers powers(g, 4);
    for (std::size_t i = 1; i <= 4; ++i)
      for (NodeId x = 0; x < 4; ++x)
        for (NodeId y = 0; y < 4; ++y) REQUIRE(std::abs(powers.power(i).at(x, y) - oracle::walk_sum(g, x, y, i)) <= 1e-12);
  }
}

TEST_CASE("matrix powers agree with walk sums on sampled 5-node digraphs") {
  for (std::uint64_t mask = 0; mask < oracle::digraph_count(5); mask += 997) {
    const auto g = oracle::digraph_from_mask(5, mask);
    const TransitionPowers powers(g, 5);
    for (std::size_t i = 1; i <= 5; ++i)
      for (NodeId x = 0; x < 5; ++x)
        for (NodeId y = 0; y < 5; ++y) REQUIRE(std::abs(powers.power(i).at(x, y) - oracle::walk_sum(g, x, y, i)) <= 1e-12);
  }
}

TEST_CASE("mixture weights") {
  const MixtureWeights w({2.0, 6.0});
  CHECK(w.window() == 2);
  CHECK(w.lambda(1) == 0.25);
  CHECK(w.lambda(2) == 0.75);
  CHECK(w.raw(2) == 6.0);
  CHECK(w.label() == "0.25;0.75");
  CHECK_THROWS_AS(MixtureWeights({}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureWeights({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureWeights({1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureWeights({1.0, NAN}), std::invalid_argument);
}

TEST_CASE("mixture_prob examples") {
  const auto g = generate_er(6, 0.4, 3);
  const MixturePredictor one(g, MixtureWeights({1.0}));
  const auto t = build_transition(g);
  for (NodeId x = 0; x < 6; ++x)
    for (NodeId y = 0; y < 6; ++y) CHECK(one.prob(x, y) == t.at(x, y));

  const MixturePredictor vmu(chain(3), MixtureWeights({0.4, 0.6}));
  CHECK(vmu.prob(0, 1) == doctest::Approx(0.4));
  CHECK(vmu.prob(0, 2) == doctest::Approx(0.6));
  CHECK(vmu.prob(2, 0) == 0.0);
  CHECK(mixture_prob(vmu, 1, 0) == 0.0);

  const MixturePredictor far(chain(5), MixtureWeights({0.5, 0.5}));
  CHECK(far.prob(0, 3) == 0.0);
}

TEST_CASE("mixture rows are distributions away from sinks") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = generate_er(9, 0.35, seed);
    const MixturePredictor m(g, MixtureWeights({0.2, 0.5, 0.3}));
    for (NodeId x = 0; x < 9; ++x) {
      const auto dist = bfs_distances(g, x);
      bool sink_near = false;
      for (NodeId y = 0; y < 9; ++y) sink_near |= dist[y] <= 2 && g.out_degree(y) == 0;
      const auto row = m.distribution(x);
      double sum = 0;
      for (double p : row) sum += p;
      if (!sink_near) {
        CHECK(std::abs(sum - 1.0) <= 1e-9);
      } else {
        CHECK(sum <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("two-hop shortcut condition examples") {
  const auto c = chain(3);
  const auto yes = shortcut_condition_2hop(c, 0, 1, 2, MixtureWeights({0.4, 0.6}));
  CHECK(yes.premises_hold);
  CHECK(yes.condition_holds);
  CHECK(yes.argmax_flips);
  CHECK(yes.threshold == doctest::Approx(1.0));
  CHECK(yes.ratio == doctest::Approx(1.5));
  CHECK(yes.p_skip == doctest::Approx(0.6));
  CHECK(yes.p_neighbor == doctest::Approx(0.4));

  const auto no = shortcut_condition_2hop(c, 0, 1, 2, MixtureWeights({0.6, 0.4}));
  CHECK(no.premises_hold);
  CHECK_FALSE(no.condition_holds);
  CHECK_FALSE(no.argmax_flips);
  CHECK(no.p_neighbor == doctest::Approx(0.6));

  // v=0 with intermediates 1 and 2, each of out-degree 1, into u=3.
  const DirectedGraph two(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const auto wide = shortcut_condition_2hop(two, 0, 1, 3, MixtureWeights({0.6, 0.4}));
  CHECK(wide.premises_hold);
  CHECK(wide.threshold == doctest::Approx(0.5));
  CHECK(wide.condition_holds);
  CHECK(wide.argmax_flips);

  // Boundary: ratio exactly equals the threshold, so the condition fails.
  const auto tie = shortcut_condition_2hop(c, 0, 1, 2, MixtureWeights({0.5, 0.5}));
  CHECK_FALSE(tie.condition_holds);
  CHECK_FALSE(tie.argmax_flips);

  const auto zero = shortcut_condition_2hop(c, 0, 1, 2, MixtureWeights({0.0, 1.0}));
  CHECK(zero.lambda1_zero);
  CHECK(zero.condition_holds);

  // Premise failures: direct edge v -> u; T^2[v][m] > 0.
  CHECK_FALSE(shortcut_condition_2hop(DirectedGraph(3, {{0, 1}, {1, 2}, {0, 2}}), 0, 1, 2, MixtureWeights({0.4, 0.6}))
                  .premises_hold);
  CHECK_FALSE(shortcut_condition_2hop(DirectedGraph(4, {{0, 1}, {1, 2}, {0, 3}, {3, 1}}), 0, 1, 2,
                                      MixtureWeights({0.4, 0.6}))
                  .premises_hold);
  CHECK_THROWS_AS(shortcut_condition_2hop(c, 0, 1, 2, MixtureWeights({1.0})), std::invalid_argument);
}

TEST_CASE("general shortcut condition examples") {
  const auto c = chain(4);
  const auto yes = shortcut_condition_general(c, 0, 1, 3, 3, MixtureWeights({0.3, 0.2, 0.5}));
  CHECK(yes.premises_hold);
  CHECK(yes.condition_holds);
  CHECK(yes.ratio == doctest::Approx(5.0 / 3.0));
  CHECK(yes.p_skip == doctest::Approx(0.5));
  CHECK(yes.p_neighbor == doctest::Approx(0.3));
  CHECK(yes.argmax_flips);

  const auto no = shortcut_condition_general(c, 0, 1, 3, 3, MixtureWeights({0.5, 0.2, 0.3}));
  CHECK(no.premises_hold);
  CHECK_FALSE(no.condition_holds);

  CHECK_THROWS_AS(shortcut_condition_general(c, 0, 1, 3, 4, MixtureWeights({0.3, 0.2, 0.5})), std::invalid_argument);
  CHECK_THROWS_AS(shortcut_condition_general(c, 0, 1, 3, 1, MixtureWeights({0.3, 0.2, 0.5})), std::invalid_argument);
  // Wrong distance: premises fail rather than throw.
  CHECK_FALSE(shortcut_condition_general(c, 0, 1, 2, 3, MixtureWeights({0.3, 0.2, 0.5})).premises_hold);
}

TEST_CASE("general condition with d = K = 2 matches the two-hop condition") {
  const std::vector<MixtureWeights> grid{MixtureWeights({0.3, 0.7}), MixtureWeights({0.5, 0.5}),
                                         MixtureWeights({0.8, 0.2}), MixtureWeights({0.0, 1.0})};
  for (std::size_t n = 3; n <= 4; ++n) {
    for (std::uint64_t mask = 0; mask < oracle::digraph_count(n); ++mask) {
      const auto g = oracle::digraph_from_mask(n, mask);
      const TransitionPowers powers(g, 2);
      for (NodeId v = 0; v < n; ++v)
        for (NodeId m = 0; m < n; ++m)
          for (NodeId u = 0; u < n; ++u) {
            if (v == m || v == u || m == u) continue;
            const auto a = analyze_shortcut_2hop(g, powers, v, m, u);
            const auto b = analyze_shortcut_general(g, powers, v, m, u, 2);
            REQUIRE(a.premises_hold == b.premises_hold);
            if (!a.premises_hold) continue;
            REQUIRE(a.path_mass == b.path_mass);
            for (const auto& w : grid) {
              const auto da = decide_shortcut(a, powers, w);
              const auto db = decide_shortcut(b, powers, w);
              REQUIRE(da.condition_holds == db.condition_holds);
              REQUIRE(da.argmax_flips == db.argmax_flips);
              if (da.condition_holds) REQUIRE(da.argmax_flips);
            }
          }
    }
  }
}

TEST_CASE("greedy generation") {
  const MixturePredictor exact(chain(3), MixtureWeights({1.0}));
  auto g = greedy_generate(exact, 0, 2, 10);
  CHECK(g.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(g.reached_target);
  CHECK(greedy_generate(exact, 0, 2, 1).nodes == std::vector<NodeId>{0});
  CHECK_THROWS_AS(greedy_generate(exact, 0, 2, 0), std::invalid_argument);

  const auto sink = greedy_generate(MixturePredictor(chain(3), MixtureWeights({1.0})), 2, 0, 5);
  CHECK(sink.stopped_at_sink);
  CHECK_FALSE(sink.reached_target);
  CHECK(sink.nodes == std::vector<NodeId>{2});

  // Ties go to the lowest id.
  const MixturePredictor fork(DirectedGraph(3, {{0, 2}, {0, 1}}), MixtureWeights({1.0}));
  CHECK(greedy_generate(fork, 0, 2, 2).nodes == std::vector<NodeId>{0, 1});
}

TEST_CASE("bridge gadget produces the shortcut transition") {
  const auto g = bridge();
  const auto cond = shortcut_condition_2hop(g, 2, 3, 4, MixtureWeights({0.4, 0.6}));
  CHECK(cond.premises_hold);
  CHECK(cond.condition_holds);
  const auto gen = greedy_generate(MixturePredictor(g, MixtureWeights({0.4, 0.6})), 0, 6, 7);
  CHECK(gen.nodes == std::vector<NodeId>{0, 2, 4, 6});
  CHECK_FALSE(g.has_edge(2, 4));
  const auto exact = greedy_generate(MixturePredictor(g, MixtureWeights({1.0, 0.0})), 0, 6, 7);
  CHECK(path_valid(g, to_predicted(exact.nodes)));
  CHECK(exact.reached_target);
}

TEST_CASE("greedy output is invariant under weight scaling") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto g = generate_er(10, 0.3, seed);
    const MixturePredictor a(g, MixtureWeights({0.2, 0.5, 0.3}));
    const auto b = a.with_weights(MixtureWeights({2.0, 5.0, 3.0}));
    const auto c = a.with_weights(MixtureWeights({0.02, 0.05, 0.03}));
    for (const auto& [s, t] : reachable_pairs(g)) {
      const auto ga = greedy_generate(a, s, t, 10).nodes;
      CHECK(ga == greedy_generate(b, s, t, 10).nodes);
      CHECK(ga == greedy_generate(c, s, t, 10).nodes);
    }
  }
}

TEST_CASE("sampled generation is seeded") {
  const auto g = generate_er(10, 0.3, 2);
  const MixturePredictor m(g, MixtureWeights({0.5, 0.5}));
  const auto a = sample_generate(m, 0, 9, 12, 1.0, 77);
  CHECK(a.nodes == sample_generate(m, 0, 9, 12, 1.0, 77).nodes);
  CHECK(a.nodes.front() == 0);
  CHECK_THROWS_AS(sample_generate(m, 0, 9, 12, 0.0, 1), std::invalid_argument);
  // Low temperature collapses to greedy.
  CHECK(sample_generate(m, 0, 9, 12, 1e-3, 5).nodes == greedy_generate(m, 0, 9, 12).nodes);
}

TEST_CASE("suffix optimality") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = generate_er(8, 0.3, seed);
    for (const auto& [s, t] : reachable_pairs(g)) {
      for (const auto& p : enumerate_shortest_paths(g, s, t)) REQUIRE(verify_suffix_optimality(g, p));
    }
  }
  const DirectedGraph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK_FALSE(verify_suffix_optimality(triangle, {0, 1, 2}));
  CHECK(verify_suffix_optimality(triangle, {0, 2}));
  CHECK_FALSE(verify_suffix_optimality(triangle, {2, 0}));
}

TEST_CASE("compression sweep") {
  const std::vector<MixtureWeights> exact{MixtureWeights({1.0, 0.0})};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_er(12, 0.2, seed);
    const auto pairs = reachable_pairs(g);
    const auto rows = compression_sweep(g, exact, pairs);
    CHECK(rows[0].nonedge_rate == 0.0);
    if (!pairs.empty()) CHECK(*rows[0].uncompressed_ratio >= 1.0);
  }

  // On a complete digraph the only non-edge is staying put, which the T^i
  // diagonal (i >= 2) can make the argmax when lambda_1 is small.
  const auto complete = generate_er(5, 1.0, 0);
  const std::vector<MixtureWeights> direct{MixtureWeights({0.9, 0.1}), MixtureWeights({0.5, 0.5}),
                                           MixtureWeights({0.5, 0.2, 0.3})};
  for (const auto& row : compression_sweep(complete, direct, reachable_pairs(complete))) {
    CHECK(row.nonedge_rate == 0.0);
    // Every neighbour ties, so greedy bounces between nodes 0 and 1 and only
    // the 8 pairs ending there succeed.
    CHECK(row.acc_exist == doctest::Approx(0.4));
  }
  const MixturePredictor lazy(complete, MixtureWeights({0.1, 0.9}));
  const auto stuck = greedy_generate(lazy, 0, 1, 4);
  CHECK(stuck.nodes == std::vector<NodeId>{0, 0, 0, 0});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dense = generate_er(6, 1.0, seed);
    const MixturePredictor m(dense, MixtureWeights({0.2, 0.3, 0.5}));
    for (const auto& [s, t] : reachable_pairs(dense)) {
      const auto nodes = greedy_generate(m, s, t, 6).nodes;
      for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
        CHECK((dense.has_edge(nodes[k], nodes[k + 1]) || nodes[k] == nodes[k + 1]));
    }
  }

  const auto g = bridge();
  const std::vector<std::pair<NodeId, NodeId>> pair{{0, 6}};
  const std::vector<MixtureWeights> bridge_grid{MixtureWeights({1.0, 0.0}), MixtureWeights({0.4, 0.6})};
  const auto rows = compression_sweep(g, bridge_grid, pair);
  CHECK(rows[0].nonedge_rate == 0.0);
  CHECK(rows[0].acc_exist == 1.0);
  CHECK(rows[1].nonedge_rate == doctest::Approx(1.0 / 3.0));
  CHECK(rows[1].acc_exist == 0.0);
  CHECK(*rows[1].uncompressed_ratio == doctest::Approx(3.0 / 4.0));

  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, compression_sweep(g, bridge_grid, pair));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("lambda_vector,acc_exist,uncompressed_ratio,nonedge_rate\n", 0) == 0);
  CHECK(a.str().find("0.4;0.6,0,0.75,0.3333333333\n") != std::string::npos);
}

TEST_CASE("audit records are JSON objects") {
  const auto g = chain(3);
  const TransitionPowers powers(g, 2);
  const MixtureWeights w({0.4, 0.6});
  const auto a = analyze_shortcut_2hop(g, powers, 0, 1, 2);
  const auto text = to_json(a, decide_shortcut(a, powers, w), w);
  CHECK(text.front() == '{');
  CHECK(text.find("\"condition_holds\":true") != std::string::npos);
  CHECK(text.find("\"path_mass\":\"1\"") != std::string::npos);
}
