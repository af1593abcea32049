#ifndef EDA_ORACLE_HPP
#define EDA_ORACLE_HPP

// Exact computations over enumerated small-network state spaces.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "eda/network.hpp"
#include "eda/stats.hpp"
#include "eda/transforms.hpp"

namespace eda {

using Mask = std::uint32_t;

inline constexpr std::size_t kMaxOracleNodes = 6;
// Largest state count for which dense transition matrices are built.
inline constexpr std::size_t kMaxDenseStates = 4096;

// Valid networks on n <= 6 nodes as bitmasks over the dyads (dyad k is bit
// k, in row-major upper-triangle order).
class StateSpace {
 public:
  explicit StateSpace(std::size_t node_count, Constraint constraint = {});

  std::size_t node_count() const { return n_; }
  std::size_t dyad_count() const { return dyads_.size(); }
  std::size_t size() const { return states_.size(); }
  const Constraint& constraint() const { return constraint_; }

  Mask mask(std::size_t state) const { return states_[state]; }
  const std::vector<Mask>& masks() const { return states_; }
  std::optional<std::size_t> find(Mask m) const;
  Dyad dyad(std::size_t k) const { return dyads_[k]; }
  std::size_t dyad_index(Dyad d) const;
  Network network(Mask m) const;
  // Whether the single-toggle adjacency graph over the states is connected.
  bool connected() const { return connected_; }
  // Dyads present in some state and absent in another.
  std::vector<std::size_t> free_dyads() const;

 private:
  std::size_t n_;
  Constraint constraint_;
  std::vector<Dyad> dyads_;
  std::vector<Mask> states_;
  std::vector<std::int32_t> index_;  // mask -> state id or -1
  bool connected_ = false;
};

StateSpace enumerate_states(std::size_t node_count, const Constraint& constraint = {});

// Statistics of every state (rows) for each term (columns).
Eigen::MatrixXd stat_table(const StateSpace& space, const std::vector<Term>& terms);

// Unnormalized log potential theta . g(y) of every mask, valid or not.
std::vector<double> mask_potentials(const StateSpace& space, const Model& model);

Eigen::VectorXd exact_pi(const StateSpace& space, const Model& model);

struct ExactMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
ExactMoments exact_moments(const StateSpace& space, const Model& model);

// Mean durations D_k = lambda * base[k - 1].
struct DurationSpec {
  std::vector<double> base;
  double lambda = 1.0;
  DyadTyper typer = DyadTyper::homogeneous();

  double duration(int type) const { return lambda * base.at(static_cast<std::size_t>(type - 1)); }
};

class NormalizationFailure : public std::runtime_error {
 public:
  NormalizationFailure(const std::string& what, std::size_t state, double outflow, double min_lambda)
      : std::runtime_error(what), state(state), outflow(outflow), min_lambda(min_lambda) {}
  std::size_t state;
  double outflow;
  double min_lambda;
};

class Reducible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact one-step transition matrix of the EDA tergm (old or new transform).
Eigen::MatrixXd build_T(const StateSpace& space, const Model& model, const DurationSpec& durations, Variant variant);

// Infinitesimal-time chain R.
Eigen::MatrixXd build_R(const StateSpace& space, const Model& model, const DurationSpec& durations);

// Left fixed vector of a stochastic matrix.
Eigen::VectorXd stationary(const Eigen::MatrixXd& m);

// max over pairs |pi_i M_ij - pi_j M_ji|.
double detailed_balance_defect(const Eigen::VectorXd& pi, const Eigen::MatrixXd& m);

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Expected number of steps an edge on dyad `dyad_index` survives, from
// entry (weighted by stationary inflow) until a transition removes it.
double mean_edge_duration_exact(const Eigen::MatrixXd& m, const StateSpace& space, std::size_t dyad_index,
                                const Eigen::VectorXd& pi);

struct AsymptoticRow {
  double lambda = 0;
  double max_abs_diff = 0;      // max |T - R|
  double tv_distance = 0;       // TV(stationary(T), pi)
  double max_duration_error = 0;  // max relative |duration - D_k| / D_k under T
};

struct AsymptoticReport {
  Variant variant = Variant::kOld;
  std::vector<AsymptoticRow> rows;
  double diff_slope = 0;
  double tv_slope = 0;
  double duration_slope = 0;
};

std::vector<AsymptoticReport> asymptotic_report(const StateSpace& space, const Model& model, const DurationSpec& base,
                                                const std::vector<double>& lambdas);

// Certificates for R at each lambda plus the asymptotic tables.
nlohmann::json oracle_report(const StateSpace& space, const Model& model, const DurationSpec& base,
                             const std::vector<double>& lambdas);

}  // namespace eda

#endif  // EDA_ORACLE_HPP
