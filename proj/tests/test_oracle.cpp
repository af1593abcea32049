#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eda/oracle.hpp"

using namespace eda;

namespace {

DurationSpec homogeneous(double base, double lambda) {
  DurationSpec d;
  d.base = {base};
  d.lambda = lambda;
  return d;
}

}  // namespace

TEST_CASE("state counts") {
  CHECK(StateSpace(3).size() == 8);
  CHECK(StateSpace(3, Constraint::max_degree(1)).size() == 4);
  CHECK(StateSpace(4).size() == 64);
  // Matchings on 4 nodes: empty, 6 single edges, 3 perfect matchings.
  CHECK(StateSpace(4, Constraint::max_degree(1)).size() == 10);
  CHECK(StateSpace(4, Constraint::max_degree(1)).connected());
  CHECK_THROWS(StateSpace(kMaxOracleNodes + 1));
  const StateSpace s(4);
  for (std::size_t k = 0; k < s.dyad_count(); ++k) CHECK(s.dyad_index(s.dyad(k)) == k);
  CHECK(s.dyad(0) == Dyad{0, 1});
  CHECK(s.dyad(5) == Dyad{2, 3});
}

TEST_CASE("pi is uniform at zero coefficients") {
  const StateSpace s(4, Constraint::max_degree(2));
  const auto pi = exact_pi(s, Model({Term::edges(), Term::degree(1)}, {0, 0}));
  for (Eigen::Index i = 0; i < pi.size(); ++i) CHECK(pi[i] == doctest::Approx(1.0 / s.size()));
}

TEST_CASE("exact moments of a Bernoulli model") {
  const StateSpace s(4);
  const auto m = exact_moments(s, Model({Term::edges()}, {logit(0.3)}));
  CHECK(m.mean[0] == doctest::Approx(6 * 0.3));
  CHECK(m.covariance(0, 0) == doctest::Approx(6 * 0.3 * 0.7));
}

TEST_CASE("one dyad: R and T in closed form") {
  const StateSpace s(2);
  const double theta = -0.7;
  const Model model({Term::edges()}, {theta});
  const auto dur = homogeneous(2.5, 4);  // D = 10
  const auto r = build_R(s, model, dur);
  CHECK(r(0, 1) == doctest::Approx(std::exp(theta) / 10));
  CHECK(r(1, 0) == doctest::Approx(0.1));
  for (Variant v : {Variant::kOld, Variant::kNew}) {
    const double f = v == Variant::kOld ? 9 : 10;
    const auto t = build_T(s, model, dur, v);
    CHECK(t(0, 1) == doctest::Approx(expit(theta - std::log(f))));
    CHECK(t(1, 0) == doctest::Approx(0.1));
  }
  CHECK_THROWS(build_T(s, model, dur, Variant::kExact));
}

TEST_CASE("stationary distribution of the two-state chain") {
  // q = 0.1 and D = 5: pi(edge) = qD / (qD + 1) = 1/3.
  Eigen::MatrixXd m(2, 2);
  m << 0.9, 0.1, 0.2, 0.8;
  const auto pi = stationary(m);
  CHECK(pi[0] == doctest::Approx(2.0 / 3));
  CHECK(pi[1] == doctest::Approx(1.0 / 3));

  const StateSpace s(2);
  const double theta = logit(0.1) + std::log(4.0);
  const auto t = build_T(s, Model({Term::edges()}, {theta}), homogeneous(5, 1), Variant::kOld);
  const auto pt = stationary(t);
  CHECK(pt[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("transition matrices are stochastic and R is reversible") {
  const StateSpace s(4, Constraint::max_degree(2));
  const Model model({Term::edges(), Term::gwesp(0.5)}, {-1, 0.4});
  const auto dur = homogeneous(1, 8);
  const auto r = build_R(s, model, dur);
  const auto t = build_T(s, model, dur, Variant::kNew);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    CHECK(r.row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t.row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.row(i).minCoeff() >= 0);
    CHECK(t.row(i).minCoeff() >= 0);
  }
  const auto pi = exact_pi(s, model);
  CHECK(detailed_balance_defect(pi, r) < 1e-15);
  CHECK(total_variation(stationary(r), pi) < 1e-13);
}

TEST_CASE("too small lambda is reported with the state that fails") {
  const StateSpace s(4);
  const Model model({Term::edges()}, {0});
  CHECK_THROWS_AS(build_R(s, model, homogeneous(1, 1)), NormalizationFailure);
  try {
    build_R(s, model, homogeneous(1, 1));
  } catch (const NormalizationFailure& e) {
    CHECK(e.min_lambda == doctest::Approx(6.0));
  }
}

TEST_CASE("pi is invariant under relabelling the nodes") {
  const StateSpace s(4, Constraint::max_degree(2));
  const Model model({Term::edges(), Term::degree(1), Term::gwesp(0.5)}, {-0.5, 0.3, 0.7});
  const auto pi = exact_pi(s, model);
  std::vector<NodeId> perm{2, 0, 3, 1};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Mask m = s.mask(i);
    Mask image = 0;
    for (std::size_t k = 0; k < s.dyad_count(); ++k)
      if (m >> k & 1U) image |= Mask{1} << s.dyad_index(Dyad::of(perm[s.dyad(k).a], perm[s.dyad(k).b]));
    const auto j = s.find(image);
    REQUIRE(j.has_value());
    CHECK(pi[static_cast<Eigen::Index>(*j)] == doctest::Approx(pi[static_cast<Eigen::Index>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("exact edge durations under R equal D") {
  const StateSpace s(3, Constraint::max_degree(1));
  const Model model({Term::edges()}, {-0.2});
  const auto dur = homogeneous(2, 3);
  const auto r = build_R(s, model, dur);
  const auto pi = stationary(r);
  for (std::size_t k = 0; k < s.dyad_count(); ++k)
    CHECK(mean_edge_duration_exact(r, s, k, pi) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("asymptotic report: T approaches R at rate 1/lambda^2 and TV at 1/lambda") {
  const StateSpace s(3);
  const Model model({Term::edges(), Term::degree(1)}, {-1, 0.5});
  const auto reports = asymptotic_report(s, model, homogeneous(1, 1), {16, 32, 64, 128});
  REQUIRE(reports.size() == 2);
  for (const auto& rep : reports) {
    CHECK(rep.diff_slope == doctest::Approx(-2).epsilon(0.1));
    CHECK(rep.tv_slope == doctest::Approx(-1).epsilon(0.1));
  }
}
