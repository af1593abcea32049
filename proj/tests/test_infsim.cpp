#include <doctest.h>

#include <cmath>
#include <map>

#include "eda/infsim.hpp"
#include "eda/mc.hpp"

using namespace eda;

namespace {

RSpec edges_spec(double theta, double lambda) {
  RSpec spec;
  spec.model = Model({Term::edges()}, {theta});
  spec.duration_base = {1.0};
  spec.lambda = lambda;
  return spec;
}

}  // namespace

TEST_CASE("rates of the R chain") {
  RSpec spec = edges_spec(std::log(0.5), 4);
  Network net(3);
  CHECK(r_rate(spec, net, Dyad::of(0, 1)) == doctest::Approx(0.5 / 4));
  net.toggle(Dyad::of(0, 1), 0);
  CHECK(r_rate(spec, net, Dyad::of(0, 1)) == doctest::Approx(0.25));
  spec.constraint = Constraint::max_degree(1);
  CHECK(r_rate(spec, net, Dyad::of(1, 2)) == 0);
}

TEST_CASE("lambda formulas") {
  CHECK(lambda_min_random_toggle(45, 5) == doctest::Approx(9));
  CHECK(lambda_tnt_analogue(10, 10, 0.1, 10) == doctest::Approx(1.0));
  CHECK(lambda_tnt_analogue(10, 10, 0.6, 10) == doctest::Approx(1.2));
  RSpec spec = edges_spec(-1, 1);
  spec.duration_base = {5};
  CHECK(auto_lambda(spec, 10) == doctest::Approx(9));
  CHECK(auto_lambda(spec, 10, 2) == doctest::Approx(18));
  CHECK_THROWS(auto_lambda(spec, 10, 0.5));
  spec.proposal = ProposalKind::kTntAnalogue;
  CHECK_THROWS(auto_lambda(spec, 10));
}

TEST_CASE("proposal names") {
  CHECK(parse_proposal("random_toggle") == ProposalKind::kRandomToggle);
  CHECK(to_string(parse_proposal("tnt_analogue")) == "tnt_analogue");
  CHECK_THROWS(parse_proposal("tnt"));
}

TEST_CASE("too small lambda overflows the acceptance probability") {
  const RSpec spec = edges_spec(0, 1);
  Network net(6);
  Rng rng(1);
  CHECK_THROWS_AS(
      {
        for (TimeStep t = 1; t < 100; ++t) step_R(spec, net, t, rng);
      },
      AcceptanceOverflow);
}

TEST_CASE("edge bound is never exceeded") {
  RSpec spec = edges_spec(0.0, 1);
  spec.proposal = ProposalKind::kTntAnalogue;
  spec.edge_bound = 4;
  spec.odds_bound = 1.0;
  spec.lambda = auto_lambda(spec, 8);
  Network net(8);
  Rng rng(2);
  std::size_t hits = 0;
  for (TimeStep t = 1; t <= 200000; ++t) {
    const auto s = step_R(spec, net, t, rng);
    hits += s.bound_hit;
    REQUIRE(net.edge_count() <= 4);
  }
  CHECK(hits > 0);
}

TEST_CASE("one-step transition frequencies match rate times proposal") {
  // Two nodes, one dyad: P(on | empty) = e^theta / (lambda D0).
  const double theta = std::log(0.6), lambda = 3;
  const RSpec spec = edges_spec(theta, lambda);
  Rng rng(4);
  int on = 0, off = 0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) {
    Network empty(2);
    on += step_R(spec, empty, 1, rng).accepted;
    Network full(2);
    full.toggle(Dyad::of(0, 1), 0);
    off += step_R(spec, full, 1, rng).accepted;
  }
  const double p_on = 0.6 / lambda, p_off = 1 / lambda;
  CHECK(std::abs(on / double(trials) - p_on) < 4 * std::sqrt(p_on * (1 - p_on) / trials));
  CHECK(std::abs(off / double(trials) - p_off) < 4 * std::sqrt(p_off * (1 - p_off) / trials));
}

TEST_CASE("TNT proposal probabilities sum to one") {
  RSpec spec = edges_spec(-1, 1);
  spec.proposal = ProposalKind::kTntAnalogue;
  spec.edge_bound = 5;
  Network net(5);
  net.toggle(Dyad::of(0, 1), 0);
  net.toggle(Dyad::of(2, 3), 0);
  // Toggle probabilities plus the null move (edge branch with no edge drawn).
  double total = 0;
  for (NodeId i = 0; i < 5; ++i)
    for (NodeId j = i + 1; j < 5; ++j) total += proposal_prob(spec, net, {i, j});
  const double null_move = 0.5 * (1 - 2.0 / 5);
  CHECK(total + null_move == doctest::Approx(1.0));
}

TEST_CASE("R run is deterministic and reports diagnostics") {
  RSpec spec = edges_spec(-1, 1);
  spec.duration_base = {2};
  spec.lambda = auto_lambda(spec, 6);
  const auto a = simulate_R(spec, Network(6), 5000, {Term::edges()}, 11, 10, 1000);
  const auto b = simulate_R(spec, Network(6), 5000, {Term::edges()}, 11, 10, 1000);
  CHECK(a.stat_series == b.stat_series);
  CHECK(a.stat_series.size() == 500);
  CHECK(a.burn_in_rows == 100);
  CHECK(a.diagnostics.at("lambda").get<double>() == doctest::Approx(spec.lambda));
  CHECK(a.diagnostics.at("max_acceptance_ratio").get<double>() <= 1.0 + 1e-12);
}

TEST_CASE("odds bound estimate for a Bernoulli model") {
  const double b = estimate_odds_bound(Model({Term::edges()}, {std::log(0.05)}), {}, Network(10), 2000, 3);
  CHECK(b == doctest::Approx(0.1));
  CHECK(estimate_odds_bound(Model({Term::edges()}, {2.0}), {}, Network(10), 2000, 3) == 1.0);
}
