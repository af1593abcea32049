#include "eda/infsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eda/tergm.hpp"

namespace eda {

namespace {

// Acceptance ratios may exceed 1 by rounding only.
constexpr double kRatioSlack = 1e-12;
// Boundary hits more frequent than this suggest N_E is too tight.
constexpr double kBoundWarnFraction = 1e-3;

}  // namespace

ProposalKind parse_proposal(std::string_view name) {
  if (name == "random_toggle" || name == "random-toggle") return ProposalKind::kRandomToggle;
  if (name == "tnt_analogue" || name == "tnt-analogue") return ProposalKind::kTntAnalogue;
  throw std::invalid_argument("unknown proposal '" + std::string(name) + "'");
}

std::string to_string(ProposalKind kind) {
  return kind == ProposalKind::kRandomToggle ? "random_toggle" : "tnt_analogue";
}

double RSpec::min_duration_base() const {
  if (duration_base.empty()) throw std::invalid_argument("R spec needs at least one base duration");
  return *std::min_element(duration_base.begin(), duration_base.end());
}

void RSpec::validate(std::size_t node_count) const {
  if (duration_base.size() != static_cast<std::size_t>(typer.type_count()))
    throw std::invalid_argument("R spec needs one base duration per dyad type");
  for (double d : duration_base)
    if (!(d > 0) || !std::isfinite(d)) throw std::invalid_argument("base durations must be positive and finite");
  if (!(lambda > 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (!(odds_bound > 0 && odds_bound <= 1)) throw std::invalid_argument("odds bound must lie in (0, 1]");
  if (model.terms.size() != model.coefs.size()) throw std::invalid_argument("model needs one coefficient per term");
  const std::size_t dyads = node_count * (node_count - 1) / 2;
  if (edge_bound && (*edge_bound == 0 || *edge_bound >= dyads))
    throw std::invalid_argument("edge bound must lie in [1, dyad count)");
  if (proposal == ProposalKind::kTntAnalogue && !edge_bound)
    throw std::invalid_argument("the TNT-analogue proposal needs an edge bound");
}

double r_rate(const RSpec& spec, const Network& net, Dyad d) {
  if (!toggle_is_valid(net, d, spec.constraint)) return 0.0;
  const double duration = spec.duration(spec.typer.type_of(d));
  if (net.has_edge(d)) return 1.0 / duration;
  return std::exp(conditional_logodds(spec.model, net, d)) / duration;
}

double lambda_min_random_toggle(std::size_t dyad_count, double duration_base) {
  return static_cast<double>(dyad_count) / duration_base;
}

double lambda_tnt_analogue(std::size_t dyad_count, std::size_t edge_bound, double odds_bound, double duration_base) {
  const auto n = static_cast<double>(dyad_count);
  const auto ne = static_cast<double>(edge_bound);
  return 2.0 / duration_base * std::max(n * ne / (n + ne), odds_bound * n);
}

double auto_lambda(const RSpec& spec, std::size_t node_count, double safety) {
  if (!(safety >= 1.0)) throw std::invalid_argument("lambda safety factor must be >= 1");
  const std::size_t dyads = node_count * (node_count - 1) / 2;
  const double d0 = spec.min_duration_base();
  if (spec.proposal == ProposalKind::kRandomToggle) return safety * lambda_min_random_toggle(dyads, d0);
  if (!spec.edge_bound) throw std::invalid_argument("the TNT-analogue proposal needs an edge bound");
  return safety * lambda_tnt_analogue(dyads, *spec.edge_bound, spec.odds_bound, d0);
}

double proposal_prob(const RSpec& spec, const Network& net, Dyad d) {
  const auto n = static_cast<double>(net.dyad_count());
  if (spec.proposal == ProposalKind::kRandomToggle) return 1.0 / n;
  const double on_mass = 0.5 / n;
  if (!net.has_edge(d)) return on_mass;
  return on_mass + 0.5 / static_cast<double>(*spec.edge_bound);
}

double estimate_odds_bound(const Model& model, const Constraint& constraint, const Network& initial,
                           std::size_t pilot_proposals, std::uint64_t seed, double margin) {
  constexpr std::size_t kCheckpoints = 20;
  ErgmSampler sampler(model, constraint, initial, seed);
  double max_logodds = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c <= kCheckpoints; ++c) {
    if (c > 0) sampler.run(pilot_proposals / kCheckpoints);
    const Network& net = sampler.network();
    for (NodeId i = 0; i < net.node_count(); ++i)
      for (NodeId j = i + 1; j < net.node_count(); ++j) {
        const Dyad d{i, j};
        if (net.has_edge(d) || !toggle_is_valid(net, d, constraint)) continue;
        max_logodds = std::max(max_logodds, conditional_logodds(model, net, d));
      }
  }
  return std::min(1.0, margin * std::exp(max_logodds));
}

RStep step_R(const RSpec& spec, Network& net, TimeStep time, Rng& rng) {
  RStep s;
  const std::size_t edges = net.edge_count();
  if (spec.proposal == ProposalKind::kRandomToggle || rng.uniform() < 0.5) {
    s.dyad = uniform_dyad(net.node_count(), rng);
  } else {
    // Each edge gets an extra 1/(2 N_E); the leftover mass proposes nothing.
    if (!(rng.uniform() * static_cast<double>(*spec.edge_bound) < static_cast<double>(edges))) return s;
    s.dyad = net.edges()[rng.below(edges)];
  }
  s.proposed = true;

  const bool on = net.has_edge(s.dyad);
  if (!on && spec.edge_bound && edges >= *spec.edge_bound) {
    s.bound_hit = true;
    return s;
  }
  const double rate = r_rate(spec, net, s.dyad);
  if (rate == 0.0) return s;
  s.ratio = rate / proposal_prob(spec, net, s.dyad);
  if (s.ratio > 1.0 + kRatioSlack)
    throw AcceptanceOverflow("acceptance probability " + std::to_string(s.ratio) +
                                 " exceeds 1; increase lambda or the odds bound",
                             s.ratio);
  if (rng.uniform() < s.ratio) {
    s.accepted = true;
    s.age = net.toggle(s.dyad, time);
  }
  return s;
}

SimulationRecord simulate_R(const RSpec& spec, Network initial, std::size_t steps, const std::vector<Term>& monitored,
                            std::uint64_t seed, std::size_t thin, std::size_t burn_in) {
  spec.validate(initial.node_count());
  if (thin == 0) throw std::invalid_argument("thin must be positive");
  if (!is_valid(initial, spec.constraint)) throw std::invalid_argument("initial network violates the constraint");
  if (spec.edge_bound && initial.edge_count() > *spec.edge_bound)
    throw std::invalid_argument("initial network exceeds the edge bound");

  SimulationRecord record;
  record.seed = seed;
  for (const auto& t : monitored) record.stat_names.push_back(t.name());
  record.burn_in_rows = burn_in / thin;

  Rng rng(seed);
  Network net = std::move(initial);
  const auto window_start = static_cast<TimeStep>(burn_in);
  const auto last = static_cast<TimeStep>(steps);
  std::size_t proposed = 0, accepted = 0, bound_hits = 0;
  double max_ratio = 0;
  for (TimeStep t = 1; t <= last; ++t) {
    const RStep s = step_R(spec, net, t, rng);
    proposed += s.proposed;
    accepted += s.accepted;
    bound_hits += s.bound_hit;
    max_ratio = std::max(max_ratio, s.ratio);
    if (s.age && t - *s.age > window_start) record.completed_spells.push_back({spec.typer.type_of(s.dyad), *s.age});
    if (t % static_cast<TimeStep>(thin) == 0) {
      record.steps.push_back(t);
      record.stat_series.push_back(stats(monitored, net));
    }
  }
  for (Dyad e : net.sorted_edges()) {
    const TimeStep formed = *net.formation_time(e);
    if (formed > window_start && last - formed >= 1)
      record.censored_spells.push_back({spec.typer.type_of(e), last - formed});
  }

  const double bound_fraction = steps > 0 ? static_cast<double>(bound_hits) / static_cast<double>(steps) : 0.0;
  record.diagnostics = {
      {"lambda", spec.lambda},
      {"odds_bound", spec.odds_bound},
      {"edge_bound", spec.edge_bound ? nlohmann::json(*spec.edge_bound) : nlohmann::json(nullptr)},
      {"proposal", to_string(spec.proposal)},
      {"max_acceptance_ratio", max_ratio},
      {"acceptance_rate", proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0},
      {"bound_hits", bound_hits},
      {"bound_hit_fraction", bound_fraction},
      {"final_edges", net.edge_count()},
  };
  if (bound_fraction > kBoundWarnFraction)
    record.diagnostics["warning"] = "edge bound reached frequently; consider a larger N_E";
  return record;
}

}  // namespace eda
