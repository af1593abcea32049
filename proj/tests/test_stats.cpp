#include <doctest.h>

#include <cmath>
#include <sstream>

#include "eda/network.hpp"
#include "eda/rng.hpp"
#include "eda/stats.hpp"

using namespace eda;

namespace {

Network from_mask(std::size_t n, std::uint32_t mask) {
  Network net(n);
  std::size_t k = 0;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j, ++k)
      if (mask >> k & 1U) net.toggle({i, j}, 0);
  return net;
}

// gwesp straight from the definition: e^a sum_i [1 - (1 - e^-a)^i] EP_i.
double gwesp_by_definition(const Network& net, double a) {
  double total = 0;
  for (Dyad e : net.edges()) {
    int sp = 0;
    for (NodeId w = 0; w < net.node_count(); ++w)
      if (w != e.a && w != e.b && net.has_edge(e.a, w) && net.has_edge(e.b, w)) ++sp;
    total += std::exp(a) * (1 - std::pow(1 - std::exp(-a), sp));
  }
  return total;
}

std::vector<Term> all_terms() {
  return {Term::edges(), Term::degree(0), Term::degree(1), Term::degree(2), Term::degree(3),
          Term::gwesp(0.5), Term::gwesp(0.0), Term::gwesp(1.7), Term::nodematch("g")};
}

}  // namespace

TEST_CASE("terms parse and print") {
  CHECK(Term::parse("degree(2)") == Term::degree(2));
  CHECK(Term::parse("gwesp(0.5)").name() == "gwesp(0.5)");
  CHECK(Term::parse("nodematch(sex)").attribute == "sex");
  CHECK_THROWS(Term::parse("triangle"));
  CHECK_THROWS(Term::parse("degree(-1)"));
  const auto terms = parse_terms("edges+degree(1)+gwesp(0.5)");
  REQUIRE(terms.size() == 3);
  CHECK(format_terms(terms) == "edges+degree(1)+gwesp(0.5)");
}

TEST_CASE("statistics on a small fixed network") {
  // Triangle 0-1-2 plus pendant edge 2-3; node 4 isolated.
  Network net(5);
  for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {0, 2}, {2, 3}}) net.toggle(Dyad::of(a, b), 0);
  CHECK(stat(Term::edges(), net) == 4);
  CHECK(stat(Term::degree(0), net) == 1);
  CHECK(stat(Term::degree(1), net) == 1);
  CHECK(stat(Term::degree(2), net) == 2);
  CHECK(stat(Term::degree(3), net) == 1);
  // Three triangle edges with one shared partner each: 3 e^a (1 - (1 - e^-a)) = 3.
  CHECK(stat(Term::gwesp(0.5), net) == doctest::Approx(3.0));
  net.set_attribute("g", {0, 0, 1, 1, 0});
  CHECK(stat(Term::nodematch("g"), net) == 2);
}

TEST_CASE("change statistics equal statistic differences on every state of 5 nodes") {
  const std::size_t n = 5;
  const auto terms = all_terms();
  double worst = 0;
  for (std::uint32_t mask = 0; mask < (1U << 10); ++mask) {
    Network net = from_mask(n, mask);
    net.set_attribute("g", {0, 1, 0, 1, 1});
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) {
        const Dyad d{i, j};
        Network on = net, off = net;
        if (!net.has_edge(d)) on.toggle(d, 0);
        if (net.has_edge(d)) off.toggle(d, 0);
        for (const auto& t : terms) worst = std::max(worst, std::abs(change_stat(t, net, d) - (stat(t, on) - stat(t, off))));
      }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("gwesp matches its definition on random 6-node networks") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const Network net = from_mask(6, static_cast<std::uint32_t>(rng.below(1U << 15)));
    for (double a : {0.0, 0.5, 2.0}) CHECK(stat(Term::gwesp(a), net) == doctest::Approx(gwesp_by_definition(net, a)));
  }
}

TEST_CASE("conditional log-odds and potential ratios agree with potentials") {
  const Model model({Term::edges(), Term::degree(1), Term::gwesp(0.5)}, {-1.2, 0.4, 0.3});
  Rng rng(4);
  for (int rep = 0; rep < 300; ++rep) {
    const Network net = from_mask(6, static_cast<std::uint32_t>(rng.below(1U << 15)));
    const Dyad d = uniform_dyad(6, rng);
    Network on = net, off = net;
    if (!net.has_edge(d)) on.toggle(d, 0);
    if (net.has_edge(d)) off.toggle(d, 0);
    CHECK(conditional_logodds(model, net, d) == doctest::Approx(potential(model, on) - potential(model, off)));
    CHECK(std::log(potential_ratio(model, off, on)) == doctest::Approx(conditional_logodds(model, net, d)));
  }
}

TEST_CASE("model files round-trip") {
  const Model model({Term::edges(), Term::degree(1)}, {-4.25, 0.125});
  std::stringstream io;
  write_model(io, model);
  const Model back = read_model(io);
  CHECK(back.terms == model.terms);
  CHECK(back.coefs == model.coefs);

  std::istringstream text("# comment\nterm=edges, coef=-1\n\nterm=gwesp(0.5), coef=0.5\n");
  const Model parsed = read_model(text);
  CHECK(parsed.terms.size() == 2);
  CHECK(parsed.coefs[1] == 0.5);
  std::istringstream bad("edges -1\n");
  CHECK_THROWS(read_model(bad));
}
