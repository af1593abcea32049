#include <doctest.h>

#include <cmath>
#include <limits>

#include "eda/transforms.hpp"

using namespace eda;

// Reference values below were computed with 30-digit arithmetic.

TEST_CASE("frozen transform values") {
  CHECK(transform_old(-3, 15).theta_plus == doctest::Approx(-5.6390573296152586).epsilon(1e-14));
  CHECK(transform_new(-3, 15).theta_plus == doctest::Approx(-5.7080502011022101).epsilon(1e-14));
  CHECK(transform_exact(-3, 15).theta_plus == doctest::Approx(-5.7047255426538036).epsilon(1e-14));
  for (Variant v : {Variant::kOld, Variant::kNew, Variant::kExact})
    CHECK(transform(v, -3, 15).theta_minus == doctest::Approx(2.6390573296152586).epsilon(1e-14));
}

TEST_CASE("duration one means every edge dissolves") {
  const auto c = transform_old(-1, 1);
  CHECK(c.theta_minus == -std::numeric_limits<double>::infinity());
  CHECK(std::isinf(c.theta_plus));
  CHECK_THROWS(transform_new(0, 0.5));
  CHECK_THROWS(transform_new(0, std::numeric_limits<double>::infinity()));
}

TEST_CASE("exact transform reproduces p and D") {
  for (double d : {1.5, 2.0, 15.0, 100.0, 1e4})
    for (double p : {1e-4, 0.01, 0.1, 0.3, 0.5}) {
      if (p / ((1 - p) * d) > 1) continue;
      const auto c = transform_exact(logit(p), d);
      const double q = expit(c.theta_plus);
      CHECK(q == doctest::Approx(formation_prob(p, d)).epsilon(1e-12));
      CHECK(equilibrium_edge_prob(q, d) == doctest::Approx(p).epsilon(1e-12));
      CHECK(1 + std::exp(c.theta_minus) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("exact transform at and beyond the consistency boundary") {
  // p = D / (D + 1) gives formation probability exactly 1.
  const double d = 4;
  CHECK(transform_exact(logit(d / (d + 1)), d).theta_plus == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(transform_exact(logit(0.9), d), ConsistencyViolation);
  CHECK_THROWS_AS(formation_prob(0.9, d), ConsistencyViolation);
}

TEST_CASE("relative error closed forms") {
  CHECK(relative_error(0.2, 4, Variant::kOld) == doctest::Approx(0.17647058823529412).epsilon(1e-14));
  CHECK(relative_error(0.2, 4, Variant::kNew) == doctest::Approx(-0.047619047619047619).epsilon(1e-14));
  CHECK(relative_error(0.2, 4, Variant::kExact) == 0);
  for (double d : {2.0, 15.0, 100.0})
    for (double p : {0.01, 0.1, 0.3, 0.6})
      for (Variant v : {Variant::kOld, Variant::kNew}) {
        const double direct = (approx_equilibrium(p, d, v) - p) / p;
        CHECK(relative_error(p, d, v) == doctest::Approx(direct).epsilon(1e-10));
      }
}

TEST_CASE("old overestimates below one half, new always underestimates") {
  for (double d : {2.0, 15.0, 100.0})
    for (double p = 0.01; p < 0.99; p += 0.07) {
      CHECK(relative_error(p, d, Variant::kNew) < 0);
      if (p < 0.5) CHECK(relative_error(p, d, Variant::kOld) > 0);
      if (p > 0.5) CHECK(relative_error(p, d, Variant::kOld) < 0);
    }
}

TEST_CASE("crossover threshold") {
  CHECK(crossover_threshold(1) == doctest::Approx(0.39038820320220757).epsilon(1e-14));
  CHECK(crossover_threshold(15) == doctest::Approx(0.33819744101321953).epsilon(1e-14));
  CHECK(crossover_threshold(100) == doctest::Approx(0.33407242436614931).epsilon(1e-14));
  CHECK(crossover_threshold(1e12) == doctest::Approx(1.0 / 3).epsilon(1e-10));
  for (double d : {2.0, 15.0, 100.0}) {
    const double c = crossover_threshold(d);
    CHECK(std::abs(relative_error(c, d, Variant::kOld)) == doctest::Approx(std::abs(relative_error(c, d, Variant::kNew))));
    CHECK(new_beats_old(c * 0.9, d));
    CHECK_FALSE(new_beats_old(std::min(0.99, c * 1.1), d));
  }
}

TEST_CASE("variant names") {
  for (Variant v : {Variant::kOld, Variant::kNew, Variant::kExact}) CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS(parse_variant("R"));
}
