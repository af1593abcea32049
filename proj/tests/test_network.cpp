#include <doctest.h>

#include <map>
#include <sstream>

#include "eda/mc.hpp"
#include "eda/network.hpp"
#include "eda/rng.hpp"

using namespace eda;

TEST_CASE("dyads are stored with ordered endpoints") {
  CHECK(Dyad::of(4, 1) == Dyad{1, 4});
  CHECK(Dyad::of(1, 4).key() == Dyad::of(4, 1).key());
  CHECK_THROWS_AS(Dyad::of(2, 2), std::invalid_argument);
}

TEST_CASE("toggle adds and removes edges and reports ages") {
  Network net(5);
  CHECK_FALSE(net.toggle(Dyad::of(0, 1), 3).has_value());
  CHECK_FALSE(net.toggle(Dyad::of(1, 2), 4).has_value());
  CHECK_FALSE(net.toggle(Dyad::of(3, 4), 4).has_value());
  CHECK(net.edge_count() == 3);
  CHECK(net.degree(1) == 2);
  CHECK(net.formation_time(Dyad::of(1, 0)) == 3);

  const auto age = net.toggle(Dyad::of(0, 1), 10);
  REQUIRE(age.has_value());
  CHECK(*age == 7);
  CHECK_FALSE(net.has_edge(0, 1));
  CHECK(net.degree(0) == 0);
  CHECK(net.edge_count() == 2);
  CHECK(net.formation_time(Dyad::of(0, 1)) == std::nullopt);
  // The swap-removed edge list still indexes correctly.
  for (Dyad d : net.edges()) CHECK(net.has_edge(d));
  CHECK(net.toggle(Dyad::of(3, 4), 5) == 1);
  CHECK(net.sorted_edges() == std::vector<Dyad>{Dyad{1, 2}});
}

TEST_CASE("adjacency stays consistent under random toggling") {
  Rng rng(11);
  Network net(12);
  std::map<std::uint64_t, bool> shadow;
  for (int step = 0; step < 5000; ++step) {
    const Dyad d = uniform_dyad(12, rng);
    net.toggle(d, step);
    shadow[d.key()] = !shadow[d.key()];
  }
  std::size_t edges = 0;
  for (auto [key, on] : shadow) edges += on;
  CHECK(net.edge_count() == edges);
  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < 12; ++v) {
    degree_sum += net.degree(v);
    for (NodeId w : net.neighbors(v)) CHECK(net.has_edge(v, w));
  }
  CHECK(degree_sum == 2 * edges);
}

TEST_CASE("uniform_dyad is uniform over dyads") {
  Rng rng(5);
  const std::size_t n = 6;
  std::map<std::uint64_t, double> counts;
  const int draws = 150000;
  for (int i = 0; i < draws; ++i) counts[uniform_dyad(n, rng).key()] += 1;
  REQUIRE(counts.size() == 15);
  std::vector<double> observed, probs;
  for (auto [key, c] : counts) {
    observed.push_back(c);
    probs.push_back(1.0 / 15);
  }
  CHECK(chi_square_gof(observed, probs).p_value > 0.001);
}

TEST_CASE("bernoulli network density") {
  Rng rng(9);
  const Network net = bernoulli_network(200, 0.05, rng, 7);
  const double density = static_cast<double>(net.edge_count()) / static_cast<double>(net.dyad_count());
  CHECK(density == doctest::Approx(0.05).epsilon(0.1));
  for (Dyad d : net.edges()) CHECK(net.formation_time(d) == 7);
}

TEST_CASE("constraints parse, print and validate toggles") {
  CHECK(Constraint::parse("none") == Constraint::none());
  CHECK(Constraint::parse("max-degree(2)") == Constraint::max_degree(2));
  CHECK(Constraint::parse("min-degree(1)").to_string() == "min-degree(1)");
  CHECK_THROWS(Constraint::parse("max-degree(x)"));
  CHECK_THROWS(Constraint::parse("fixed-edges"));
  CHECK_FALSE(Constraint::min_degree(1).guarantees_free_off_toggles());
  CHECK(Constraint::max_degree(1).guarantees_free_off_toggles());

  Network net(4);
  net.toggle(Dyad::of(0, 1), 0);
  const auto max1 = Constraint::max_degree(1);
  CHECK(is_valid(net, max1));
  CHECK_FALSE(toggle_is_valid(net, Dyad::of(1, 2), max1));
  CHECK(toggle_is_valid(net, Dyad::of(2, 3), max1));
  CHECK(toggle_is_valid(net, Dyad::of(0, 1), max1));

  net.toggle(Dyad::of(2, 3), 0);
  const auto min1 = Constraint::min_degree(1);
  CHECK(is_valid(net, min1));
  CHECK_FALSE(toggle_is_valid(net, Dyad::of(0, 1), min1));
  CHECK(toggle_is_valid(net, Dyad::of(0, 2), min1));
  CHECK_FALSE(is_valid(Network(4), min1));
}

TEST_CASE("dyad typers") {
  const Dyad d01 = Dyad::of(0, 1), d02 = Dyad::of(0, 2), d12 = Dyad::of(1, 2);
  const auto homog = DyadTyper::homogeneous();
  CHECK(homog.type_count() == 1);
  CHECK(homog.type_of(d01) == 1);

  const auto match = DyadTyper::by_match({0, 0, 1});
  CHECK(match.type_count() == 2);
  CHECK(match.type_of(d01) == 2);
  CHECK(match.type_of(d02) == 1);

  const auto pair = DyadTyper::by_pair({0, 1, 2, 1});
  CHECK(pair.type_count() == 6);
  CHECK(pair.type_of(d01) == 2);
  CHECK(pair.type_of(d12) == 5);
  CHECK(pair.type_of(Dyad::of(1, 3)) == 4);
  CHECK(pair.type_of(Dyad::of(2, 0)) == 3);
}

TEST_CASE("edge lists round-trip") {
  Network net(6);
  net.toggle(Dyad::of(4, 2), 9);
  net.toggle(Dyad::of(0, 5), -3);
  std::stringstream io;
  write_edgelist(io, net);
  CHECK(io.str() == "nodes=6\n1 6 -3\n3 5 9\n");
  const Network back = read_edgelist(io);
  CHECK(back.same_edges(net));
  CHECK(back.formation_time(Dyad::of(2, 4)) == 9);

  std::istringstream bad("nodes=3\n1 1 0\n");
  CHECK_THROWS(read_edgelist(bad));
  std::istringstream dup("nodes=3\n1 2 0\n2 1 0\n");
  CHECK_THROWS(read_edgelist(dup));
}
