#include <doctest.h>

#include <cmath>

#include "eda/calibrate.hpp"

using namespace eda;

TEST_CASE("exact calibration of a Bernoulli model") {
  const StateSpace s(3);
  const auto r = calibrate_exact(s, {Term::edges()}, {1.5});
  CHECK(r.coefs[0] == doctest::Approx(0).scale(1));
  CHECK(std::abs(r.coefs[0]) < 1e-9);
}

TEST_CASE("exact calibration round-trips model moments") {
  const StateSpace s(4, Constraint::max_degree(2));
  const std::vector<Term> terms{Term::edges(), Term::degree(1)};
  const auto fit = calibrate_exact(s, terms, {2.0, 1.2});
  const auto m = exact_moments(s, Model(terms, fit.coefs));
  CHECK(std::abs(m.mean[0] - 2.0) < 1e-8);
  CHECK(std::abs(m.mean[1] - 1.2) < 1e-8);
  CHECK(fit.residual < 1e-8);

  const Model truth(terms, {-0.4, 0.9});
  const auto mt = exact_moments(s, truth);
  const auto back = calibrate_exact(s, terms, {mt.mean[0], mt.mean[1]});
  CHECK(back.coefs[0] == doctest::Approx(-0.4).epsilon(1e-8));
  CHECK(back.coefs[1] == doctest::Approx(0.9).epsilon(1e-8));
}

TEST_CASE("exact calibration rejects unreachable targets") {
  const StateSpace s(3);
  CHECK_THROWS_AS(calibrate_exact(s, {Term::edges()}, {3.0}), NonConvergence);
  CHECK_THROWS_AS(calibrate_exact(s, {Term::edges(), Term::degree(1)}, {1.0, 4.0}), NonConvergence);
  // Two edges is the most a matching on 4 nodes can hold.
  const StateSpace matchings(4, Constraint::max_degree(1));
  CHECK_THROWS_AS(calibrate_exact(matchings, {Term::edges()}, {2.0}), NonConvergence);
  CHECK(calibrate_exact(matchings, {Term::edges()}, {1.5}).residual < 1e-10);
}

TEST_CASE("closed-form start") {
  const auto start = closed_form_start({Term::edges(), Term::degree(1)}, {35, 20}, 100);
  CHECK(start[0] == doctest::Approx(logit(35.0 / 4950)));
  CHECK(start[1] == 0);
}

namespace {

StochasticOptions small_options() {
  StochasticOptions o;
  o.iterations = 150;
  o.samples_per_iteration = 10;
  o.pilot_samples = 500;
  o.confirm_samples = 3000;
  o.accept_start = false;
  return o;
}

}  // namespace

TEST_CASE("stochastic calibration of an edges-only model") {
  const std::size_t n = 50;
  const double target = 20;
  const auto r = calibrate_stochastic({Term::edges()}, {target}, n, small_options(), 17);
  CHECK_FALSE(r.kept_start);
  const auto& c = r.confirmation[0];
  CHECK(std::abs(c.mean - target) < 3 * c.se + 0.02 * target);
  CHECK(r.coefs[0] == doctest::Approx(logit(target / 1225)).epsilon(0.02));
}

TEST_CASE("stochastic calibration keeps a start that already fits") {
  auto o = small_options();
  o.accept_start = true;
  const auto r = calibrate_stochastic({Term::edges()}, {20}, 50, o, 17);
  CHECK(r.kept_start);
  CHECK(r.coefs[0] == logit(20.0 / 1225));
}

TEST_CASE("stochastic calibration rejects infeasible targets") {
  CHECK_THROWS_AS(calibrate_stochastic({Term::edges(), Term::degree(1)}, {20, 60}, 50, small_options(), 1),
                  NonConvergence);
  CHECK_THROWS_AS(calibrate_stochastic({Term::edges()}, {0}, 50, small_options(), 1), NonConvergence);
}

TEST_CASE("stochastic calibration is deterministic given the seed") {
  const std::vector<Term> terms{Term::edges(), Term::degree(1)};
  const auto a = calibrate_stochastic(terms, {25, 20}, 40, small_options(), 5);
  const auto b = calibrate_stochastic(terms, {25, 20}, 40, small_options(), 5);
  CHECK(a.coefs == b.coefs);
}
