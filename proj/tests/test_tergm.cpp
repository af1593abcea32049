#include <doctest.h>

#include <cmath>
#include <limits>

#include "eda/record.hpp"
#include "eda/tergm.hpp"

using namespace eda;

namespace {

Network full_network(std::size_t n, TimeStep formed) {
  Network net(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) net.toggle({i, j}, formed);
  return net;
}

}  // namespace

TEST_CASE("offsets follow the transform") {
  const Model ergm({Term::edges()}, {-2});
  const auto old_spec = TergmSpec::eda(ergm, {15}, Variant::kOld);
  const auto new_spec = TergmSpec::eda(ergm, {15}, Variant::kNew);
  CHECK(old_spec.offsets[0] == doctest::Approx(-std::log(14.0)));
  CHECK(new_spec.offsets[0] == doctest::Approx(-std::log(15.0)));
  CHECK(old_spec.theta_minus(1) == doctest::Approx(std::log(14.0)));
  CHECK_THROWS(TergmSpec::eda(ergm, {15}, Variant::kExact));
  const auto exact = TergmSpec::eda_exact(ergm, {15}, {-2});
  CHECK(exact.offsets[0] + -2 == doctest::Approx(transform_exact(-2, 15).theta_plus));
}

TEST_CASE("infinite negative formation offset never forms edges") {
  auto spec = TergmSpec::eda(Model({Term::edges()}, {0}), {5}, Variant::kNew);
  spec.offsets[0] = -std::numeric_limits<double>::infinity();
  spec.proposals_per_phase = 1000;
  Network net(10);
  Rng rng(2);
  for (TimeStep t = 1; t <= 20; ++t) {
    const auto ps = step_formation(net, spec, t, rng);
    CHECK(ps.accepted == 0);
    step_dissolution(net, spec, t, rng);
  }
  CHECK(net.edge_count() == 0);
}

TEST_CASE("dissolution removes each old edge with probability 1/D") {
  const auto spec = TergmSpec::eda(Model({Term::edges()}, {-1}), {4}, Variant::kOld);
  Network net = full_network(120, 0);
  const double before = static_cast<double>(net.edge_count());
  Rng rng(3);
  const auto removed = step_dissolution(net, spec, 1, rng);
  const double frac = static_cast<double>(removed.size()) / before;
  CHECK(std::abs(frac - 0.25) < 4 * std::sqrt(0.25 * 0.75 / before));
  for (const auto& r : removed) CHECK(r.age == 1);

  // Edges formed in the current step are not eligible.
  Network fresh = full_network(10, 5);
  CHECK(step_dissolution(fresh, spec, 5, rng).empty());
}

TEST_CASE("formation never touches edges present at phase start") {
  auto spec = TergmSpec::eda(Model({Term::edges()}, {-30}), {5}, Variant::kNew);
  spec.proposals_per_phase = 5000;
  Network net = full_network(6, 0);
  Rng rng(8);
  step_formation(net, spec, 1, rng);
  CHECK(net.edge_count() == 15);
}

TEST_CASE("simulations are deterministic given the seed") {
  auto spec = TergmSpec::eda(Model({Term::edges(), Term::degree(1)}, {-3, 0.5}), {10}, Variant::kOld);
  spec.proposals_per_phase = 200;
  const std::vector<Term> monitored{Term::edges(), Term::degree(1)};
  const auto a = simulate_tergm(spec, Network(30), 10, 50, monitored, 99);
  const auto b = simulate_tergm(spec, Network(30), 10, 50, monitored, 99);
  const auto c = simulate_tergm(spec, Network(30), 10, 50, monitored, 100);
  CHECK(a.stat_series == b.stat_series);
  CHECK(a.completed_spells.size() == b.completed_spells.size());
  CHECK(a.stat_series != c.stat_series);
  CHECK(a.stat_series.size() == 60);
  CHECK(a.burn_in_rows == 10);
}

TEST_CASE("dyad-independent prevalence matches the transformed equilibrium") {
  const double p = 0.1, d = 5;
  const std::size_t n = 30;
  for (Variant v : {Variant::kOld, Variant::kNew}) {
    auto spec = TergmSpec::eda(Model({Term::edges()}, {logit(p)}), {d}, v);
    spec.proposals_per_phase = 20 * 435;
    const auto rec = simulate_tergm(spec, Network(n), 100, 2000, {Term::edges()}, 5);
    const auto est = rec.estimate(0);
    const double expected = approx_equilibrium(p, d, v) * 435;
    CHECK(std::abs(est.mean - expected) < 4 * est.se);
  }
}

TEST_CASE("ergm sampler matches the Bernoulli density") {
  ErgmSampler sampler(Model({Term::edges()}, {logit(0.2)}), {}, Network(40), 6);
  double total = 0;
  const int samples = 400;
  sampler.run(20000);
  for (int s = 0; s < samples; ++s) {
    sampler.run(2000);
    total += static_cast<double>(sampler.network().edge_count());
  }
  CHECK(total / samples / 780 == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("spec validation") {
  auto spec = TergmSpec::eda(Model({Term::edges()}, {-1}), {5}, Variant::kOld);
  spec.durations.push_back(3);
  CHECK_THROWS(spec.validate());
}
