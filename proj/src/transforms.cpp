#include "eda/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack used when deciding whether a quantity sits exactly on the
// consistency boundary q = 1.
constexpr double kBoundarySlack = 8 * std::numeric_limits<double>::epsilon();

void require_duration(double duration) {
  if (!(duration >= 1.0) || !std::isfinite(duration))
    throw std::invalid_argument("mean duration must be finite and >= 1");
}

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("edge probability must lie in (0, 1)");
}

double alpha_of(Variant v) {
  switch (v) {
    case Variant::kOld:
      return 1.0;
    case Variant::kNew:
      return 0.0;
    case Variant::kExact:
      break;
  }
  throw std::invalid_argument("closed-form error only defined for the old and new variants");
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "old") return Variant::kOld;
  if (name == "new") return Variant::kNew;
  if (name == "exact") return Variant::kExact;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kOld:
      return "old";
    case Variant::kNew:
      return "new";
    case Variant::kExact:
      return "exact";
  }
  return {};
}

DyadTargets DyadTargets::from_probability(double p, double duration) {
  require_probability(p);
  require_duration(duration);
  return {p, logit(p), duration};
}

DyadTargets DyadTargets::from_logodds(double theta, double duration) {
  require_duration(duration);
  return {expit(theta), theta, duration};
}

double logit(double p) {
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;
  return std::log(p) - std::log1p(-p);
}

double expit(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

CoefficientPair transform_old(double theta, double duration) {
  require_duration(duration);
  const double theta_minus = std::log(duration - 1.0);
  return {theta - theta_minus, theta_minus};
}

CoefficientPair transform_new(double theta, double duration) {
  require_duration(duration);
  return {theta - std::log(duration), std::log(duration - 1.0)};
}

CoefficientPair transform_exact(double theta, double duration) {
  require_duration(duration);
  const double odds = std::exp(theta);
  const double gap = duration - odds;
  const double theta_minus = std::log(duration - 1.0);
  if (std::abs(gap) <= kBoundarySlack * duration) return {kInf, theta_minus};
  if (gap < 0)
    throw ConsistencyViolation("edge odds " + std::to_string(odds) + " exceed mean duration " +
                               std::to_string(duration) + "; no formation probability matches both");
  return {theta - std::log(gap), theta_minus};
}

CoefficientPair transform(Variant v, double theta, double duration) {
  switch (v) {
    case Variant::kOld:
      return transform_old(theta, duration);
    case Variant::kNew:
      return transform_new(theta, duration);
    case Variant::kExact:
      return transform_exact(theta, duration);
  }
  return {};
}

double formation_prob(double p, double duration) {
  require_probability(p);
  require_duration(duration);
  const double q = p / ((1.0 - p) * duration);
  if (q > 1.0 + kBoundarySlack)
    throw ConsistencyViolation("formation probability " + std::to_string(q) + " exceeds 1");
  return std::min(q, 1.0);
}

double equilibrium_edge_prob(double q, double duration) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("formation probability must lie in [0, 1]");
  require_duration(duration);
  const double qd = q * duration;
  return qd / (qd + 1.0);
}

double approx_equilibrium(double p, double duration, Variant v) {
  require_probability(p);
  require_duration(duration);
  if (v == Variant::kExact) return p;
  // Formation probability implied by the transformed coefficient, pushed
  // through the two-state stationary formula.
  const double theta_plus = transform(v, logit(p), duration).theta_plus;
  return equilibrium_edge_prob(expit(theta_plus), duration);
}

double relative_error(double p, double duration, Variant v) {
  require_probability(p);
  require_duration(duration);
  switch (v) {
    case Variant::kOld:
      return (1.0 - 2.0 * p) / (duration + 2.0 * p - 1.0);
    case Variant::kNew:
      return -p / (duration + p);
    case Variant::kExact:
      return 0.0;
  }
  return 0.0;
}

double crossover_threshold(double duration) {
  require_duration(duration);
  // Upper root of 4p^2 - (2 - 3D)p - D, written as 2D / (sqrt(.) + 3D - 2)
  // to avoid cancellation at large D.
  const double disc = std::sqrt(4.0 + 4.0 * duration + 9.0 * duration * duration);
  return 2.0 * duration / (disc + 3.0 * duration - 2.0);
}

bool new_beats_old(double p, double duration) { return p < crossover_threshold(duration); }

}  // namespace eda
