#include <doctest.h>

#include <cmath>
#include <sstream>

#include "eda/experiment.hpp"

using namespace eda;

TEST_CASE("config round-trips through json") {
  ExperimentConfig c;
  c.durations = {15, 40};
  c.variants = {"old", "R"};
  c.seed = 77;
  c.calibration.iterations = 12;
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.durations == c.durations);
  CHECK(back.calibration.iterations == 12);
}

TEST_CASE("config validation") {
  CHECK_THROWS(config_from_json({{"no_such_key", 1}}));
  CHECK_THROWS(config_from_json({{"variants", nlohmann::json::array()}}));
  CHECK_THROWS(config_from_json({{"variants", {"older"}}}));
  CHECK_THROWS(config_from_json({{"design", "sweep"}}));
  CHECK(config_from_json({{"design", "single_dyad"}}).design == Design::kSingleDyad);
}

TEST_CASE("design names") {
  for (Design d : {Design::kDeg1Sweep, Design::kGwespSweep, Design::kSingleDyad, Design::kOracleSuite})
    CHECK(parse_design(to_string(d)) == d);
}

TEST_CASE("dyad-independent degree(1) reference") {
  // n (n - 1) p (1 - p)^(n - 2) with p = md / (n - 1).
  const double p = 0.7 / 99;
  CHECK(dyad_independent_degree1(100, 0.7) == doctest::Approx(100 * 99 * p * std::pow(1 - p, 98)));
}

TEST_CASE("model specs") {
  const Model m = parse_model_spec("edges=-1 degree(1)=0.5");
  REQUIRE(m.terms.size() == 2);
  CHECK(m.terms[1] == Term::degree(1));
  CHECK(m.coefs[1] == 0.5);
  CHECK_THROWS(parse_model_spec("edges"));
}

namespace {

ExperimentConfig tiny_sweep() {
  ExperimentConfig c;
  c.node_count = 30;
  c.mean_degree = {1.0};
  c.degree1_target = {};
  c.durations = {5};
  c.variants = {"old", "new", "R"};
  c.proposals_per_phase = 200;
  c.burn_in_durations = 5;
  c.steps_per_duration = 40;
  c.r_lifetimes = 50;
  c.r_pilot_proposals = 5000;
  c.calibration.iterations = 30;
  c.calibration.pilot_samples = 200;
  c.calibration.confirm_samples = 500;
  c.calibration.tolerance = 0.2;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("plot data is deterministic given the seed") {
  const auto c = tiny_sweep();
  std::ostringstream a, b;
  write_plotdata(a, run_experiment(c));
  write_plotdata(b, run_experiment(c));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("design,node_count,mean_degree,degree1_target,degree2_target,gwesp_target,duration,p,variant,"
                      "statistic,rel_error,stderr\n",
                      0) == 0);
}

TEST_CASE("sweep cells carry errors for each variant") {
  const auto table = run_experiment(tiny_sweep());
  CHECK_FALSE(table.any_failed());
  CHECK(table.select(5, "old").size() == 1);
  CHECK(table.select(5, "R").size() == 1);
  for (const auto& cell : table.cells) {
    CHECK(cell.find("edges") != nullptr);
    CHECK(cell.find("duration") != nullptr);
  }
}

TEST_CASE("single-dyad design reproduces the closed-form errors") {
  ExperimentConfig c;
  c.design = Design::kSingleDyad;
  c.single_dyad_p = {0.3};
  c.durations = {10};
  c.variants = {"old", "new"};
  c.single_dyad_steps = 200000;
  const auto table = run_experiment(c);
  for (const auto& cell : table.cells) {
    const auto* s = cell.find("edges");
    REQUIRE(s != nullptr);
    if (cell.variant == "exact") {
      CHECK(std::abs(s->rel_error) < 4 * s->rel_se);
      continue;
    }
    const double expected = relative_error(0.3, 10, parse_variant(cell.variant));
    CHECK(std::abs(s->rel_error - expected) < 4 * s->rel_se);
  }
}
