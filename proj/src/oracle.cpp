#include "eda/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "eda/mc.hpp"

namespace eda {

namespace {

constexpr double kResidualTolerance = 1e-12;
constexpr double kCrossCheckTolerance = 1e-8;
// Above this size the squaring cross-check is replaced by a support
// connectivity check.
constexpr std::size_t kMaxSquaringStates = 512;

bool mask_is_valid(Mask m, const std::vector<Dyad>& dyads, std::size_t n, const Constraint& c) {
  if (c.kind == Constraint::Kind::none) return true;
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t k = 0; k < dyads.size(); ++k)
    if (m >> k & 1U) {
      ++degree[dyads[k].a];
      ++degree[dyads[k].b];
    }
  for (std::size_t d : degree) {
    if (c.kind == Constraint::Kind::max_degree && d > c.bound) return false;
    if (c.kind == Constraint::Kind::min_degree && d < c.bound) return false;
  }
  return true;
}

void require_dense(const StateSpace& space) {
  if (space.size() > kMaxDenseStates)
    throw std::invalid_argument("state space has " + std::to_string(space.size()) +
                                " states; dense matrices are limited to " + std::to_string(kMaxDenseStates));
}

std::vector<double> dyad_durations(const StateSpace& space, const DurationSpec& durations) {
  std::vector<double> out(space.dyad_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = durations.duration(durations.typer.type_of(space.dyad(k)));
  return out;
}

// Sum of w[k] over the set bits of m.
double bit_sum(Mask m, const std::vector<double>& w) {
  double s = 0;
  while (m != 0) {
    s += w[static_cast<std::size_t>(std::countr_zero(m))];
    m &= m - 1;
  }
  return s;
}

bool support_strongly_connected(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> todo;
    todo.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!todo.empty()) {
      const std::size_t i = todo.front();
      todo.pop();
      for (std::size_t j = 0; j < n; ++j) {
        const double v = forward ? m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                                 : m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        if (v > 0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          todo.push(j);
        }
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

double max_free_duration_error(const Eigen::MatrixXd& m, const StateSpace& space, const DurationSpec& durations,
                               const Eigen::VectorXd& pi) {
  double worst = 0;
  for (std::size_t k : space.free_dyads()) {
    const double target = durations.duration(durations.typer.type_of(space.dyad(k)));
    const double d = mean_edge_duration_exact(m, space, k, pi);
    worst = std::max(worst, std::abs(d - target) / target);
  }
  return worst;
}

// Values at or below `floor` are rounding noise and admit no slope.
double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y, double floor = 0) {
  for (double v : y)
    if (!(v > floor)) return std::numeric_limits<double>::quiet_NaN();
  return loglog_slope(x, y);
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

StateSpace::StateSpace(std::size_t node_count, Constraint constraint) : n_(node_count), constraint_(constraint) {
  if (node_count < 2 || node_count > kMaxOracleNodes)
    throw std::invalid_argument("oracle state spaces need 2 to " + std::to_string(kMaxOracleNodes) + " nodes");
  for (NodeId i = 0; i < n_; ++i)
    for (NodeId j = i + 1; j < n_; ++j) dyads_.push_back({i, j});
  const Mask total = Mask{1} << dyads_.size();
  index_.assign(total, -1);
  for (Mask m = 0; m < total; ++m)
    if (mask_is_valid(m, dyads_, n_, constraint_)) {
      index_[m] = static_cast<std::int32_t>(states_.size());
      states_.push_back(m);
    }

  if (states_.empty()) return;
  std::vector<char> seen(states_.size(), 0);
  std::queue<Mask> todo;
  todo.push(states_[0]);
  seen[0] = 1;
  std::size_t count = 1;
  while (!todo.empty()) {
    const Mask m = todo.front();
    todo.pop();
    for (std::size_t k = 0; k < dyads_.size(); ++k) {
      const std::int32_t j = index_[m ^ (Mask{1} << k)];
      if (j >= 0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++count;
        todo.push(m ^ (Mask{1} << k));
      }
    }
  }
  connected_ = count == states_.size();
}

std::optional<std::size_t> StateSpace::find(Mask m) const {
  if (m >= index_.size() || index_[m] < 0) return std::nullopt;
  return static_cast<std::size_t>(index_[m]);
}

std::size_t StateSpace::dyad_index(Dyad d) const {
  const auto it = std::find(dyads_.begin(), dyads_.end(), d);
  if (it == dyads_.end()) throw std::out_of_range("dyad outside the state space");
  return static_cast<std::size_t>(it - dyads_.begin());
}

Network StateSpace::network(Mask m) const {
  Network net(n_);
  for (std::size_t k = 0; k < dyads_.size(); ++k)
    if (m >> k & 1U) net.toggle(dyads_[k], 0);
  return net;
}

std::vector<std::size_t> StateSpace::free_dyads() const {
  Mask any = 0, all = ~Mask{0};
  for (Mask m : states_) {
    any |= m;
    all &= m;
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dyads_.size(); ++k)
    if ((any >> k & 1U) && !(all >> k & 1U)) out.push_back(k);
  return out;
}

StateSpace enumerate_states(std::size_t node_count, const Constraint& constraint) {
  return StateSpace(node_count, constraint);
}

Eigen::MatrixXd stat_table(const StateSpace& space, const std::vector<Term>& terms) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(terms.size()));
  for (std::size_t s = 0; s < space.size(); ++s) {
    const auto v = stats(terms, space.network(space.mask(s)));
    for (std::size_t t = 0; t < terms.size(); ++t) g(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = v[t];
  }
  return g;
}

std::vector<double> mask_potentials(const StateSpace& space, const Model& model) {
  const Mask total = Mask{1} << space.dyad_count();
  std::vector<double> phi(total);
  for (Mask m = 0; m < total; ++m) phi[m] = potential(model, space.network(m));
  return phi;
}

Eigen::VectorXd exact_pi(const StateSpace& space, const Model& model) {
  Eigen::VectorXd logw(static_cast<Eigen::Index>(space.size()));
  for (std::size_t s = 0; s < space.size(); ++s)
    logw(static_cast<Eigen::Index>(s)) = potential(model, space.network(space.mask(s)));
  const Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp();
  return w / w.sum();
}

ExactMoments exact_moments(const StateSpace& space, const Model& model) {
  const Eigen::MatrixXd g = stat_table(space, model.terms);
  const Eigen::VectorXd pi = exact_pi(space, model);
  ExactMoments out;
  out.mean = g.transpose() * pi;
  const Eigen::MatrixXd centered = g.rowwise() - out.mean.transpose();
  out.covariance = centered.transpose() * pi.asDiagonal() * centered;
  return out;
}

Eigen::MatrixXd build_T(const StateSpace& space, const Model& model, const DurationSpec& durations, Variant variant) {
  if (variant == Variant::kExact) throw std::invalid_argument("build_T supports the old and new transforms");
  require_dense(space);
  const auto dur = dyad_durations(space, durations);
  std::vector<double> form_weight(dur.size()), diss_weight(dur.size());
  for (std::size_t k = 0; k < dur.size(); ++k) {
    if (!(dur[k] > 1.0)) throw std::invalid_argument("build_T needs every duration > 1");
    form_weight[k] = -std::log(variant == Variant::kOld ? dur[k] - 1.0 : dur[k]);
    diss_weight[k] = -std::log(dur[k] - 1.0);
  }
  const auto phi = mask_potentials(space, model);

  const auto size = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd t(size, size);
  std::vector<double> logw(space.size());
  for (Eigen::Index i = 0; i < size; ++i) {
    const Mask mi = space.mask(static_cast<std::size_t>(i));
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < size; ++j) {
      const Mask mj = space.mask(static_cast<std::size_t>(j));
      const double lw = phi[mi | mj] - phi[mi] + bit_sum(mj & ~mi, form_weight) + bit_sum(mi & ~mj, diss_weight);
      logw[static_cast<std::size_t>(j)] = lw;
      top = std::max(top, lw);
    }
    double total = 0;
    for (Eigen::Index j = 0; j < size; ++j) {
      const double w = std::exp(logw[static_cast<std::size_t>(j)] - top);
      t(i, j) = w;
      total += w;
    }
    t.row(i) /= total;
  }
  return t;
}

Eigen::MatrixXd build_R(const StateSpace& space, const Model& model, const DurationSpec& durations) {
  require_dense(space);
  const auto dur = dyad_durations(space, durations);
  const auto size = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(size, size);
  std::vector<double> phi(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) phi[s] = potential(model, space.network(space.mask(s)));

  double worst_outflow = 0;
  std::size_t worst_state = 0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const Mask mi = space.mask(static_cast<std::size_t>(i));
    double outflow = 0;
    for (std::size_t k = 0; k < space.dyad_count(); ++k) {
      const Mask mj = mi ^ (Mask{1} << k);
      const auto j = space.find(mj);
      if (!j) continue;
      const bool on = (mi >> k & 1U) == 0;
      const double rate = on ? std::exp(phi[*j] - phi[static_cast<std::size_t>(i)]) / dur[k] : 1.0 / dur[k];
      r(i, static_cast<Eigen::Index>(*j)) = rate;
      outflow += rate;
    }
    if (outflow > worst_outflow) {
      worst_outflow = outflow;
      worst_state = static_cast<std::size_t>(i);
    }
    r(i, i) = 1.0 - outflow;
  }
  if (worst_outflow > 1.0 + kResidualTolerance)
    throw NormalizationFailure("R has outflow " + std::to_string(worst_outflow) + " > 1 at state " +
                                   std::to_string(worst_state) + "; lambda must be at least " +
                                   std::to_string(durations.lambda * worst_outflow),
                               worst_state, worst_outflow, durations.lambda * worst_outflow);
  for (Eigen::Index i = 0; i < size; ++i) r(i, i) = std::max(r(i, i), 0.0);
  return r;
}

Eigen::VectorXd stationary(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) throw std::invalid_argument("stationary needs a nonempty square matrix");
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd pi = lu.solve(b);
  for (int pass = 0; pass < 2; ++pass) pi += lu.solve(b - a * pi);
  if (!pi.allFinite()) throw Reducible("stationary system is singular; the chain is reducible");

  const double residual = (m.transpose() * pi - pi).cwiseAbs().maxCoeff() + std::abs(pi.sum() - 1.0);
  if (residual > kResidualTolerance)
    throw std::runtime_error("stationary residual " + std::to_string(residual) + " exceeds tolerance");

  if (static_cast<std::size_t>(n) <= kMaxSquaringStates) {
    Eigen::MatrixXd p = 0.5 * (Eigen::MatrixXd::Identity(n, n) + m);
    for (int k = 0; k < 96; ++k) {
      p = (p * p).eval();
      const double spread = (p.colwise().maxCoeff() - p.colwise().minCoeff()).maxCoeff();
      if (spread < 1e-14) break;
    }
    const double gap = (p.row(0).transpose() - pi).cwiseAbs().maxCoeff();
    if (gap > kCrossCheckTolerance)
      throw Reducible("power iteration disagrees with the linear solve by " + std::to_string(gap));
  } else if (!support_strongly_connected(m)) {
    throw Reducible("transition support is not strongly connected");
  }
  return pi;
}

double detailed_balance_defect(const Eigen::VectorXd& pi, const Eigen::MatrixXd& m) {
  double worst = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(pi(i) * m(i, j) - pi(j) * m(j, i)));
  return worst;
}

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

double mean_edge_duration_exact(const Eigen::MatrixXd& m, const StateSpace& space, std::size_t dyad_index,
                                const Eigen::VectorXd& pi) {
  const Mask bit = Mask{1} << dyad_index;
  std::vector<Eigen::Index> inside, outside;
  for (std::size_t s = 0; s < space.size(); ++s)
    (space.mask(s) & bit ? inside : outside).push_back(static_cast<Eigen::Index>(s));
  if (inside.empty() || outside.empty()) return std::numeric_limits<double>::quiet_NaN();

  const auto k = static_cast<Eigen::Index>(inside.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd entry = Eigen::VectorXd::Zero(k);
  for (Eigen::Index x = 0; x < k; ++x) {
    for (Eigen::Index y = 0; y < k; ++y) a(x, y) -= m(inside[static_cast<std::size_t>(x)], inside[static_cast<std::size_t>(y)]);
    for (Eigen::Index o : outside) entry(x) += pi(o) * m(o, inside[static_cast<std::size_t>(x)]);
  }
  if (!(entry.sum() > 0)) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::VectorXd time = a.partialPivLu().solve(Eigen::VectorXd::Ones(k));
  return entry.dot(time) / entry.sum();
}

std::vector<AsymptoticReport> asymptotic_report(const StateSpace& space, const Model& model, const DurationSpec& base,
                                                const std::vector<double>& lambdas) {
  if (lambdas.size() < 2 || !std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("asymptotic report needs at least two ascending lambdas");
  const Eigen::VectorXd pi = exact_pi(space, model);
  std::vector<AsymptoticReport> out;
  for (Variant v : {Variant::kOld, Variant::kNew}) {
    AsymptoticReport rep;
    rep.variant = v;
    std::vector<double> diffs, tvs, durs;
    for (double lambda : lambdas) {
      DurationSpec d = base;
      d.lambda = lambda;
      const Eigen::MatrixXd r = build_R(space, model, d);
      const Eigen::MatrixXd t = build_T(space, model, d, v);
      const Eigen::VectorXd pt = stationary(t);
      AsymptoticRow row;
      row.lambda = lambda;
      row.max_abs_diff = (t - r).cwiseAbs().maxCoeff();
      row.tv_distance = total_variation(pt, pi);
      row.max_duration_error = max_free_duration_error(t, space, d, pt);
      diffs.push_back(row.max_abs_diff);
      tvs.push_back(row.tv_distance);
      durs.push_back(row.max_duration_error);
      rep.rows.push_back(row);
    }
    rep.diff_slope = slope_or_nan(lambdas, diffs);
    rep.tv_slope = slope_or_nan(lambdas, tvs);
    rep.duration_slope = slope_or_nan(lambdas, durs, 1e-12);
    out.push_back(std::move(rep));
  }
  return out;
}

nlohmann::json oracle_report(const StateSpace& space, const Model& model, const DurationSpec& base,
                             const std::vector<double>& lambdas) {
  nlohmann::json report;
  report["nodes"] = space.node_count();
  report["constraint"] = space.constraint().to_string();
  report["states"] = space.size();
  report["connected"] = space.connected();
  report["terms"] = format_terms(model.terms);
  report["coefs"] = model.coefs;
  report["duration_base"] = base.base;
  const bool durations_asserted = space.constraint().guarantees_free_off_toggles();
  report["durations_asserted"] = durations_asserted;

  const Eigen::VectorXd pi = exact_pi(space, model);
  nlohmann::json certificates = nlohmann::json::array();
  for (double lambda : lambdas) {
    DurationSpec d = base;
    d.lambda = lambda;
    nlohmann::json c{{"lambda", lambda}};
    try {
      const Eigen::MatrixXd r = build_R(space, model, d);
      c["detailed_balance_defect"] = detailed_balance_defect(pi, r);
      c["stationary_error"] = (stationary(r) - pi).cwiseAbs().maxCoeff();
      c["max_duration_error_R"] = number_or_null(max_free_duration_error(r, space, d, pi));
    } catch (const NormalizationFailure& e) {
      c["normalization_failure"] = {{"state", e.state}, {"outflow", e.outflow}, {"min_lambda", e.min_lambda}};
    }
    certificates.push_back(std::move(c));
  }
  report["certificates"] = std::move(certificates);

  if (lambdas.size() >= 2) {
    try {
      nlohmann::json tables = nlohmann::json::array();
      for (const auto& rep : asymptotic_report(space, model, base, lambdas)) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : rep.rows)
          rows.push_back({{"lambda", row.lambda},
                          {"max_abs_T_minus_R", row.max_abs_diff},
                          {"tv_stationary_T_pi", row.tv_distance},
                          {"max_duration_error_T", number_or_null(row.max_duration_error)}});
        tables.push_back({{"variant", to_string(rep.variant)},
                          {"rows", std::move(rows)},
                          {"slope_max_abs_T_minus_R", number_or_null(rep.diff_slope)},
                          {"slope_tv", number_or_null(rep.tv_slope)},
                          {"slope_duration_error", number_or_null(rep.duration_slope)}});
      }
      report["asymptotics"] = std::move(tables);
    } catch (const std::exception& e) {
      report["asymptotics_error"] = e.what();
    }
  }
  return report;
}

}  // namespace eda
