#include "eda/calibrate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "eda/rng.hpp"
#include "eda/tergm.hpp"
#include "eda/transforms.hpp"

namespace eda {

namespace {

// Coefficients beyond this magnitude mean the iteration ran away.
constexpr double kCoefLimit = 50.0;
// Smallest covariance eigenvalue of a converged exact fit below which the
// target is taken to sit on the boundary of the attainable statistics.
constexpr double kBoundaryVariance = 1e-8;

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double log_partition(const Eigen::MatrixXd& g, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd lw = g * theta;
  const double top = lw.maxCoeff();
  return top + std::log((lw.array() - top).exp().sum());
}

double relative_gap(double value, double target) {
  return target != 0 ? std::abs(value - target) / std::abs(target) : std::abs(value);
}

void check_feasible(const std::vector<Term>& terms, const std::vector<double>& targets, std::size_t node_count) {
  if (terms.size() != targets.size()) throw std::invalid_argument("need one target per term");
  const auto n = static_cast<double>(node_count);
  const double dyads = n * (n - 1) / 2;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double t = targets[k];
    const std::string name = terms[k].name();
    switch (terms[k].kind) {
      case Term::Kind::edges:
        if (!(t > 0 && t < dyads))
          throw NonConvergence("target " + std::to_string(t) + " for " + name + " lies outside (0, dyads)", t);
        break;
      case Term::Kind::degree:
        if (!(t > 0 && t < n))
          throw NonConvergence("target " + std::to_string(t) + " for " + name + " lies outside (0, nodes)", t);
        break;
      case Term::Kind::gwesp:
      case Term::Kind::nodematch:
        if (!(t > 0)) throw NonConvergence("target for " + name + " must be positive", t);
        break;
    }
  }
}

}  // namespace

ExactCalibration calibrate_exact(const StateSpace& space, const std::vector<Term>& terms,
                                 const std::vector<double>& targets, int max_iterations, double tolerance) {
  if (terms.size() != targets.size()) throw std::invalid_argument("need one target per term");
  check_feasible(terms, targets, space.node_count());
  const Eigen::MatrixXd g = stat_table(space, terms);
  const Eigen::VectorXd target = to_eigen(targets);
  Eigen::VectorXd theta = to_eigen(closed_form_start(terms, targets, space.node_count()));
  if (!theta.allFinite()) theta.setZero();

  auto loglik = [&](const Eigen::VectorXd& th) { return th.dot(target) - log_partition(g, th); };
  ExactCalibration out;
  double residual = 0;
  for (int it = 0; it <= max_iterations; ++it) {
    const ExactMoments mom = exact_moments(space, Model{terms, to_vector(theta)});
    const Eigen::VectorXd grad = target - mom.mean;
    residual = grad.cwiseAbs().maxCoeff();
    if (residual <= tolerance) {
      // Boundary targets are matched only in the limit |theta| -> inf,
      // where the distribution collapses onto a face and g stops varying.
      if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mom.covariance).eigenvalues().minCoeff() <
          kBoundaryVariance)
        throw NonConvergence("target lies on the boundary of the attainable statistics; no finite solution",
                             residual);
      out.coefs = to_vector(theta);
      out.iterations = it;
      out.residual = residual;
      return out;
    }
    if (it == max_iterations) break;
    const Eigen::VectorXd step = mom.covariance.completeOrthogonalDecomposition().solve(grad);
    const double base = loglik(theta);
    const double slope = grad.dot(step);
    double alpha = 1.0;
    while (alpha > 1e-12 && !(loglik(theta + alpha * step) >= base + 1e-4 * alpha * slope)) alpha *= 0.5;
    theta += alpha * step;
  }
  throw NonConvergence("exact calibration did not converge; residual " + std::to_string(residual), residual);
}

std::vector<double> closed_form_start(const std::vector<Term>& terms, const std::vector<double>& targets,
                                      std::size_t node_count) {
  const double dyads = static_cast<double>(node_count) * static_cast<double>(node_count - 1) / 2;
  std::vector<double> theta(terms.size(), 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (terms[k].kind == Term::Kind::edges && targets[k] > 0 && targets[k] < dyads)
      theta[k] = logit(targets[k] / dyads);
  return theta;
}

StochasticCalibration calibrate_stochastic(const std::vector<Term>& terms, const std::vector<double>& targets,
                                           std::size_t node_count, const StochasticOptions& options,
                                           std::uint64_t seed) {
  check_feasible(terms, targets, node_count);
  if (options.iterations < 10) throw std::invalid_argument("stochastic calibration needs at least 10 iterations");
  const std::size_t dim = terms.size();
  const std::size_t interval = options.sample_interval > 0 ? options.sample_interval : 10 * node_count;
  const std::size_t burn = options.burn_in > 0 ? options.burn_in : 200 * interval;
  const Eigen::VectorXd target = to_eigen(targets);

  StochasticCalibration out;
  Eigen::VectorXd theta = to_eigen(closed_form_start(terms, targets, node_count));

  Rng init_rng(derive_seed(seed, 0));
  double p0 = 0;
  for (std::size_t k = 0; k < dim; ++k)
    if (terms[k].kind == Term::Kind::edges)
      p0 = targets[k] / (static_cast<double>(node_count) * static_cast<double>(node_count - 1) / 2);
  Network initial = bernoulli_network(node_count, p0, init_rng);
  if (!is_valid(initial, options.constraint)) initial = Network(node_count);
  ErgmSampler sampler(Model{terms, to_vector(theta)}, options.constraint, std::move(initial), derive_seed(seed, 1));
  sampler.run(burn);

  auto sample = [&](std::size_t count) {
    std::vector<std::vector<double>> series(dim);
    for (auto& s : series) s.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      sampler.run(interval);
      const auto v = stats(terms, sampler.network());
      for (std::size_t k = 0; k < dim; ++k) series[k].push_back(v[k]);
    }
    return series;
  };
  auto summarize = [&](const std::vector<std::vector<double>>& series) {
    out.confirmation.clear();
    out.rel_gaps.clear();
    for (std::size_t k = 0; k < dim; ++k) {
      out.confirmation.push_back(batch_means(series[k]));
      out.rel_gaps.push_back(relative_gap(out.confirmation.back().mean, targets[k]));
    }
    return std::all_of(out.rel_gaps.begin(), out.rel_gaps.end(), [&](double r) { return r <= options.tolerance; });
  };

  const auto pilot = sample(options.pilot_samples);
  if (options.accept_start && summarize(pilot)) {
    out.coefs = to_vector(theta);
    out.kept_start = true;
    return out;
  }

  Eigen::MatrixXd centered(static_cast<Eigen::Index>(options.pilot_samples), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const Eigen::VectorXd col = to_eigen(pilot[k]);
    centered.col(static_cast<Eigen::Index>(k)) = col.array() - col.mean();
  }
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(options.pilot_samples);
  cov.diagonal().array() += 1e-6 * std::max(cov.diagonal().maxCoeff(), 1.0);
  const Eigen::MatrixXd gain = cov.ldlt().solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));

  const double tau = std::max(1.0, static_cast<double>(options.iterations) / 10.0);
  Eigen::VectorXd theta_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  std::size_t averaged = 0;
  for (std::size_t t = 0; t < options.iterations; ++t) {
    const auto batch = sample(options.samples_per_iteration);
    Eigen::VectorXd mean(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) mean(static_cast<Eigen::Index>(k)) = to_eigen(batch[k]).mean();
    const Eigen::VectorXd gap = target - mean;
    theta += gain * gap / (1.0 + static_cast<double>(t) / tau);
    out.trace.push_back({{"iteration", t}, {"gap", to_vector(gap)}, {"coefs", to_vector(theta)}});
    if (!theta.allFinite() || theta.cwiseAbs().maxCoeff() > kCoefLimit)
      throw NonConvergence("stochastic calibration diverged", gap.cwiseAbs().maxCoeff(), out.trace);
    sampler.set_coefs(to_vector(theta));
    if (2 * t >= options.iterations) {
      theta_sum += theta;
      ++averaged;
    }
  }
  out.iterations = options.iterations;
  theta = theta_sum / static_cast<double>(averaged);
  out.coefs = to_vector(theta);
  sampler.set_coefs(out.coefs);
  sampler.run(burn);
  if (!summarize(sample(options.confirm_samples))) {
    const double worst = *std::max_element(out.rel_gaps.begin(), out.rel_gaps.end());
    throw NonConvergence("confirmation run misses a target by relative gap " + std::to_string(worst), worst,
                         out.trace);
  }
  return out;
}

}  // namespace eda
