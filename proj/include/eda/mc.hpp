#ifndef EDA_MC_HPP
#define EDA_MC_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "eda/network.hpp"

namespace eda {

// A Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0;
  double se = 0;
  std::size_t n = 0;
};

// Batch-means estimate for an autocorrelated series. The batch count is
// capped at `batches`; shorter series fall back to sqrt(n) batches.
Estimate batch_means(std::span<const double> series, std::size_t batches = 64);

// Plain iid estimate (sample standard deviation / sqrt(n)).
Estimate iid_mean(std::span<const double> values);

// |a - b| measured in units of the combined standard error.
double z_distance(const Estimate& a, const Estimate& b);

struct KsResult {
  double statistic = 0;
  double p_value = 0;
  std::size_t n = 0;
};

// One-sample Kolmogorov-Smirnov test of integer ages >= 1 against the
// geometric distribution on {1, 2, ...} with the given mean. The p-value
// uses the asymptotic Kolmogorov distribution, which is conservative for a
// discrete null.
KsResult ks_test_geometric(std::span<const TimeStep> ages, double mean);

// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double x);

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 0;
};

// Pearson goodness-of-fit of counts against category probabilities.
ChiSquareResult chi_square_gof(std::span<const double> counts, std::span<const double> probs);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace eda

#endif  // EDA_MC_HPP
