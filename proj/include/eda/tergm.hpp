#ifndef EDA_TERGM_HPP
#define EDA_TERGM_HPP

#include <cstdint>
#include <vector>

#include "eda/network.hpp"
#include "eda/record.hpp"
#include "eda/rng.hpp"
#include "eda/stats.hpp"
#include "eda/transforms.hpp"

namespace eda {

// Discrete-time separable EDA tergm.
//
// The formation model is the cross-sectional ergm plus one dyad-type offset
// per type (theta+ - theta); the dissolution model is dyad-independent and
// given by the mean durations D_k, i.e. theta- = log(D_k - 1).
struct TergmSpec {
  Model formation;
  std::vector<double> offsets;
  std::vector<double> durations;
  Constraint constraint;
  DyadTyper typer = DyadTyper::homogeneous();
  // Metropolis-Hastings proposals per formation phase; 0 selects
  // max(20 * edges, 10^4).
  std::size_t proposals_per_phase = 0;

  // Old or new transform applied per dyad type.
  static TergmSpec eda(Model ergm, std::vector<double> durations, Variant variant,
                       DyadTyper typer = DyadTyper::homogeneous(), Constraint constraint = {});

  // Exact transform; it depends on each type's ergm log-odds, so it is only
  // meaningful for dyad-independent ergms.
  static TergmSpec eda_exact(Model ergm, std::vector<double> durations, const std::vector<double>& type_logodds,
                             DyadTyper typer = DyadTyper::homogeneous(), Constraint constraint = {});

  double duration(int type) const { return durations.at(static_cast<std::size_t>(type - 1)); }
  double theta_minus(int type) const;
  double formation_logodds(const Network& net, Dyad d) const;
  std::size_t proposals_for(const Network& net) const;

  void validate() const;
};

// Edge removed by a dissolution phase.
struct Dissolution {
  Dyad dyad;
  int type = 1;
  TimeStep formed = 0;
  TimeStep age = 0;
};

struct PhaseStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

// Formation phase of time step `time`: Metropolis-Hastings over the dyads
// empty at phase start, targeting the formation model on the formation
// network. Edges added earlier in the same phase may be toggled back off;
// edges present at phase start are never touched. New edges are stamped
// with `time`.
PhaseStats step_formation(Network& net, const TergmSpec& spec, TimeStep time, Rng& rng);

// Dissolution phase of time step `time`: each edge formed before `time`
// is removed independently with probability 1/D_k.
std::vector<Dissolution> step_dissolution(Network& net, const TergmSpec& spec, TimeStep time, Rng& rng);

// Runs burn_in + steps time steps (formation then dissolution) starting at
// time step 1, recording the monitored statistics after every step.
SimulationRecord simulate_tergm(const TergmSpec& spec, Network initial, std::size_t burn_in, std::size_t steps,
                                const std::vector<Term>& monitored, std::uint64_t seed);

// Tie/no-tie Metropolis-Hastings sampler for a cross-sectional ergm.
class ErgmSampler {
 public:
  ErgmSampler(Model model, Constraint constraint, Network initial, std::uint64_t seed);

  void run(std::size_t proposals);

  const Network& network() const { return net_; }
  const Model& model() const { return model_; }
  void set_coefs(std::vector<double> coefs);
  std::size_t proposals() const { return proposals_; }
  std::size_t accepted() const { return accepted_; }

 private:
  Model model_;
  Constraint constraint_;
  Network net_;
  Rng rng_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

}  // namespace eda

#endif  // EDA_TERGM_HPP
