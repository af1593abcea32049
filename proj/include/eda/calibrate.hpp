#ifndef EDA_CALIBRATE_HPP
#define EDA_CALIBRATE_HPP

// Moment matching: find theta with E_theta[g] equal to target statistics.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "eda/mc.hpp"
#include "eda/network.hpp"
#include "eda/oracle.hpp"
#include "eda/stats.hpp"

namespace eda {

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual, nlohmann::json trace = nlohmann::json::array())
      : std::runtime_error(what), residual(residual), trace(std::move(trace)) {}
  double residual;
  nlohmann::json trace;
};

struct ExactCalibration {
  std::vector<double> coefs;
  int iterations = 0;
  double residual = 0;  // max |E[g] - target|
};

// Damped Newton on the exact log-likelihood, using the exact covariance of
// g as Jacobian.
ExactCalibration calibrate_exact(const StateSpace& space, const std::vector<Term>& terms,
                                 const std::vector<double>& targets, int max_iterations = 200,
                                 double tolerance = 1e-10);

struct StochasticOptions {
  double tolerance = 0.02;  // relative gap allowed in the confirmation run
  std::size_t iterations = 300;
  std::size_t samples_per_iteration = 20;
  std::size_t sample_interval = 0;  // proposals between samples; 0 selects 10 * nodes
  std::size_t burn_in = 0;          // proposals; 0 selects 200 * sample_interval
  std::size_t pilot_samples = 2000;
  std::size_t confirm_samples = 20000;
  // Return the starting point when the pilot run already meets the tolerance.
  bool accept_start = true;
  Constraint constraint;
};

struct StochasticCalibration {
  std::vector<double> coefs;
  std::vector<Estimate> confirmation;  // per-term means of the confirmation run
  std::vector<double> rel_gaps;
  std::size_t iterations = 0;
  bool kept_start = false;
  nlohmann::json trace = nlohmann::json::array();
};

// Starting point: edges coefficient logit(target / dyads), others 0.
std::vector<double> closed_form_start(const std::vector<Term>& terms, const std::vector<double>& targets,
                                      std::size_t node_count);

// Robbins-Monro with gain a_t = a0 / (1 + t / tau), tau = iterations / 10,
// a0 the inverse pilot covariance, Polyak averaging over the second half.
StochasticCalibration calibrate_stochastic(const std::vector<Term>& terms, const std::vector<double>& targets,
                                           std::size_t node_count, const StochasticOptions& options,
                                           std::uint64_t seed);

}  // namespace eda

#endif  // EDA_CALIBRATE_HPP
