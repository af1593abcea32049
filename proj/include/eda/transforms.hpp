#ifndef EDA_TRANSFORMS_HPP
#define EDA_TRANSFORMS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace eda {

// Which dyad-independent coefficient transform to apply.
//   kOld:   theta+ = theta - log(D - 1)
//   kNew:   theta+ = theta - log(D)
//   kExact: theta+ = theta - log(D - exp(theta))
// All three share theta- = log(D - 1).
enum class Variant { kOld, kNew, kExact };

Variant parse_variant(std::string_view name);
std::string to_string(Variant v);

// No memoryless dyad-independent stergm matches both the edge probability
// and the mean duration: p / ((1 - p) D) > 1.
class ConsistencyViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Formation and dissolution linear predictors. Either may be infinite:
// theta_minus = -inf when D = 1, theta_plus = +inf when the formation
// probability is 1.
struct CoefficientPair {
  double theta_plus = 0;
  double theta_minus = 0;
};

// Cross-sectional edge probability and mean duration for one dyad.
struct DyadTargets {
  double p;
  double theta;
  double duration;

  static DyadTargets from_probability(double p, double duration);
  static DyadTargets from_logodds(double theta, double duration);
};

double logit(double p);
double expit(double x);

CoefficientPair transform_old(double theta, double duration);
CoefficientPair transform_new(double theta, double duration);
CoefficientPair transform_exact(double theta, double duration);
CoefficientPair transform(Variant v, double theta, double duration);

// Formation probability q that gives stationary edge probability p with
// mean duration D: q = p / ((1 - p) D).
double formation_prob(double p, double duration);

// Stationary edge probability of the two-state chain with formation
// probability q and dissolution probability 1/D: qD / (qD + 1).
double equilibrium_edge_prob(double q, double duration);

// Edge probability actually attained when the old or new transform is used
// for a dyad whose target probability is p.
double approx_equilibrium(double p, double duration, Variant v);

// (p_variant - p) / p in closed form.
double relative_error(double p, double duration, Variant v);

// Edge probability below which the new transform has the smaller error.
double crossover_threshold(double duration);

bool new_beats_old(double p, double duration);

}  // namespace eda

#endif  // EDA_TRANSFORMS_HPP
