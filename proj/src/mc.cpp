#include "eda/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace eda {

Estimate iid_mean(std::span<const double> values) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

Estimate batch_means(std::span<const double> series, std::size_t batches) {
  const std::size_t n = series.size();
  Estimate e;
  e.n = n;
  if (n == 0) return e;
  e.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::size_t count = std::min(batches, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  if (count < 2) return e;
  const std::size_t size = n / count;
  std::vector<double> means(count);
  for (std::size_t b = 0; b < count; ++b) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(b * size);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
               static_cast<double>(size);
  }
  e.se = iid_mean(means).se;
  return e;
}

double z_distance(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.se, b.se);
  const double diff = std::abs(a.mean - b.mean);
  if (se == 0) return diff == 0 ? 0 : INFINITY;
  return diff / se;
}

double kolmogorov_survival(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_geometric(std::span<const TimeStep> ages, double mean) {
  if (!(mean >= 1.0)) throw std::invalid_argument("geometric mean must be >= 1");
  KsResult r;
  r.n = ages.size();
  if (r.n == 0) return r;
  std::vector<TimeStep> sorted(ages.begin(), ages.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw std::invalid_argument("geometric ages must be >= 1");

  // Both CDFs are step functions jumping at integers, so the supremum is
  // attained at the distinct observed values and just below them.
  const double survive = 1.0 - 1.0 / mean;
  const auto n = static_cast<double>(r.n);
  double worst = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const TimeStep a = sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == a) ++j;
    const double below_emp = static_cast<double>(i) / n;
    const double at_emp = static_cast<double>(j) / n;
    const double below_cdf = 1.0 - std::pow(survive, static_cast<double>(a - 1));
    const double at_cdf = 1.0 - std::pow(survive, static_cast<double>(a));
    worst = std::max({worst, std::abs(below_emp - below_cdf), std::abs(at_emp - at_cdf)});
    i = j;
  }
  r.statistic = worst;
  const double sq = std::sqrt(n);
  r.p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * worst);
  return r;
}

ChiSquareResult chi_square_gof(std::span<const double> counts, std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw std::invalid_argument("chi-square needs matching count/probability vectors");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  ChiSquareResult r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected <= 0) throw std::invalid_argument("chi-square category with zero expectation");
    r.statistic += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  r.dof = counts.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace eda
