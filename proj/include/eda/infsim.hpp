#ifndef EDA_INFSIM_HPP
#define EDA_INFSIM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "eda/network.hpp"
#include "eda/record.hpp"
#include "eda/rng.hpp"
#include "eda/stats.hpp"

namespace eda {

enum class ProposalKind { kRandomToggle, kTntAnalogue };

ProposalKind parse_proposal(std::string_view name);
std::string to_string(ProposalKind kind);

// A proposed toggle whose acceptance probability R_ij / P(j|i) exceeds 1:
// lambda or the odds bound is too small for the chosen proposal.
class AcceptanceOverflow : public std::runtime_error {
 public:
  AcceptanceOverflow(const std::string& what, double ratio) : std::runtime_error(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

// The infinitesimal-time EDA chain R. Off-diagonal entries:
//   on-toggle of a type-k dyad:  (pi(j) / pi(i)) / D_k
//   off-toggle of a type-k edge: 1 / D_k
// with D_k = lambda * duration_base[k - 1]. Toggles into invalid states
// have rate 0. With an edge bound N_E the chain is restricted to states
// with at most N_E edges.
struct RSpec {
  Model model;
  Constraint constraint;
  DyadTyper typer = DyadTyper::homogeneous();
  std::vector<double> duration_base;
  double lambda = 1.0;
  double odds_bound = 1.0;
  std::optional<std::size_t> edge_bound;
  ProposalKind proposal = ProposalKind::kRandomToggle;

  double duration(int type) const { return lambda * duration_base.at(static_cast<std::size_t>(type - 1)); }
  double min_duration_base() const;

  void validate(std::size_t node_count) const;
};

double r_rate(const RSpec& spec, const Network& net, Dyad d);

// lambda with lambda * D0 equal to the dyad count.
double lambda_min_random_toggle(std::size_t dyad_count, double duration_base);

// lambda = 2 / D0 * max(N N_E / (N + N_E), c N).
double lambda_tnt_analogue(std::size_t dyad_count, std::size_t edge_bound, double odds_bound, double duration_base);

// lambda for the spec's proposal (using the smallest D0 over dyad types),
// times a safety factor >= 1.
double auto_lambda(const RSpec& spec, std::size_t node_count, double safety = 1.0);

// Selection probability P(j|i) of the network that toggles d.
double proposal_prob(const RSpec& spec, const Network& net, Dyad d);

// Upper bound on conditional edge odds, estimated as exp(max log-odds seen
// over the dyads proposed by a tie/no-tie ergm pilot run) times `margin`,
// capped at 1.
double estimate_odds_bound(const Model& model, const Constraint& constraint, const Network& initial,
                           std::size_t pilot_proposals, std::uint64_t seed, double margin = 2.0);

struct RStep {
  bool proposed = false;
  bool accepted = false;
  bool bound_hit = false;
  Dyad dyad;
  double ratio = 0;
  std::optional<TimeStep> age;  // set when an edge was removed
};

// One step of R (or of the restricted chain under an edge bound): draw a
// dyad from the proposal, accept with probability r_rate / P(j|i).
RStep step_R(const RSpec& spec, Network& net, TimeStep time, Rng& rng);

// Iterates step_R for `steps` steps starting at step 1. Statistics are
// recorded every `thin` steps; the first `burn_in` steps are burn-in.
// Each step spans 1/lambda natural time units.
SimulationRecord simulate_R(const RSpec& spec, Network initial, std::size_t steps, const std::vector<Term>& monitored,
                            std::uint64_t seed, std::size_t thin = 1, std::size_t burn_in = 0);

}  // namespace eda

#endif  // EDA_INFSIM_HPP
