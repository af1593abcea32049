#include "eda/tergm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tnt.hpp"

namespace eda {

namespace {

constexpr std::size_t kMinProposals = 10000;
constexpr std::size_t kProposalsPerEdge = 20;

}  // namespace

TergmSpec TergmSpec::eda(Model ergm, std::vector<double> durations, Variant variant, DyadTyper typer,
                         Constraint constraint) {
  if (variant == Variant::kExact)
    throw std::invalid_argument("the exact transform needs per-type log-odds; use TergmSpec::eda_exact");
  TergmSpec spec;
  spec.formation = std::move(ergm);
  spec.typer = std::move(typer);
  spec.constraint = constraint;
  for (double d : durations) spec.offsets.push_back(transform(variant, 0.0, d).theta_plus);
  spec.durations = std::move(durations);
  return spec;
}

TergmSpec TergmSpec::eda_exact(Model ergm, std::vector<double> durations, const std::vector<double>& type_logodds,
                               DyadTyper typer, Constraint constraint) {
  if (type_logodds.size() != durations.size())
    throw std::invalid_argument("need one log-odds value per dyad type");
  TergmSpec spec;
  spec.formation = std::move(ergm);
  spec.typer = std::move(typer);
  spec.constraint = constraint;
  for (std::size_t k = 0; k < durations.size(); ++k) {
    const double theta_plus = transform_exact(type_logodds[k], durations[k]).theta_plus;
    spec.offsets.push_back(theta_plus - type_logodds[k]);
  }
  spec.durations = std::move(durations);
  return spec;
}

double TergmSpec::theta_minus(int type) const { return std::log(duration(type) - 1.0); }

double TergmSpec::formation_logodds(const Network& net, Dyad d) const {
  const double offset = offsets[static_cast<std::size_t>(typer.type_of(d) - 1)];
  if (std::isinf(offset)) return offset;
  return offset + conditional_logodds(formation, net, d);
}

std::size_t TergmSpec::proposals_for(const Network& net) const {
  if (proposals_per_phase > 0) return proposals_per_phase;
  return std::max(kProposalsPerEdge * net.edge_count(), kMinProposals);
}

void TergmSpec::validate() const {
  const auto types = static_cast<std::size_t>(typer.type_count());
  if (durations.size() != types || offsets.size() != types)
    throw std::invalid_argument("tergm spec needs one duration and one offset per dyad type");
  for (double d : durations)
    if (!(d >= 1.0) || !std::isfinite(d)) throw std::invalid_argument("durations must be finite and >= 1");
  for (double o : offsets)
    if (std::isnan(o)) throw std::invalid_argument("formation offset is NaN");
  if (formation.terms.size() != formation.coefs.size())
    throw std::invalid_argument("formation model needs one coefficient per term");
}

PhaseStats step_formation(Network& net, const TergmSpec& spec, TimeStep time, Rng& rng) {
  PhaseStats out;
  detail::FormationPool pool(net, time);
  if (pool.free_count() == 0) return out;
  out.proposals = spec.proposals_for(net);
  auto logodds = [&](Dyad d) { return spec.formation_logodds(net, d); };
  for (std::size_t i = 0; i < out.proposals; ++i)
    if (detail::tnt_propose(net, pool, logodds, spec.constraint, time, rng)) ++out.accepted;
  return out;
}

std::vector<Dissolution> step_dissolution(Network& net, const TergmSpec& spec, TimeStep time, Rng& rng) {
  std::vector<Dissolution> gone;
  for (Dyad e : net.edges()) {
    const TimeStep formed = *net.formation_time(e);
    if (formed >= time) continue;
    const int type = spec.typer.type_of(e);
    if (rng.uniform() < 1.0 / spec.duration(type)) gone.push_back({e, type, formed, 0});
  }
  for (auto& g : gone) g.age = *net.toggle(g.dyad, time);
  return gone;
}

SimulationRecord simulate_tergm(const TergmSpec& spec, Network initial, std::size_t burn_in, std::size_t steps,
                                const std::vector<Term>& monitored, std::uint64_t seed) {
  spec.validate();
  if (!is_valid(initial, spec.constraint)) throw std::invalid_argument("initial network violates the constraint");

  SimulationRecord record;
  record.seed = seed;
  for (const auto& t : monitored) record.stat_names.push_back(t.name());
  record.burn_in_rows = burn_in;
  record.steps.reserve(burn_in + steps);
  record.stat_series.reserve(burn_in + steps);

  Rng rng(seed);
  Network net = std::move(initial);
  const auto window_start = static_cast<TimeStep>(burn_in);
  const auto last = static_cast<TimeStep>(burn_in + steps);
  double proposals = 0, accepted = 0;
  for (TimeStep t = 1; t <= last; ++t) {
    const PhaseStats phase = step_formation(net, spec, t, rng);
    proposals += static_cast<double>(phase.proposals);
    accepted += static_cast<double>(phase.accepted);
    for (const auto& g : step_dissolution(net, spec, t, rng))
      if (g.formed > window_start) record.completed_spells.push_back({g.type, g.age});
    record.steps.push_back(t);
    record.stat_series.push_back(stats(monitored, net));
  }
  for (Dyad e : net.sorted_edges()) {
    const TimeStep formed = *net.formation_time(e);
    if (formed > window_start && last - formed >= 1)
      record.censored_spells.push_back({spec.typer.type_of(e), last - formed});
  }

  record.diagnostics = {
      {"mean_proposals_per_phase", last > 0 ? proposals / static_cast<double>(last) : 0.0},
      {"formation_acceptance_rate", proposals > 0 ? accepted / proposals : 0.0},
      {"final_edges", net.edge_count()},
  };
  return record;
}

ErgmSampler::ErgmSampler(Model model, Constraint constraint, Network initial, std::uint64_t seed)
    : model_(std::move(model)), constraint_(constraint), net_(std::move(initial)), rng_(seed) {
  if (!is_valid(net_, constraint_)) throw std::invalid_argument("initial network violates the constraint");
}

void ErgmSampler::set_coefs(std::vector<double> coefs) {
  if (coefs.size() != model_.terms.size()) throw std::invalid_argument("coefficient count mismatch");
  model_.coefs = std::move(coefs);
}

void ErgmSampler::run(std::size_t proposals) {
  detail::ErgmPool pool(net_);
  auto logodds = [&](Dyad d) { return conditional_logodds(model_, net_, d); };
  for (std::size_t i = 0; i < proposals; ++i)
    if (detail::tnt_propose(net_, pool, logodds, constraint_, 0, rng_)) ++accepted_;
  proposals_ += proposals;
}

}  // namespace eda
