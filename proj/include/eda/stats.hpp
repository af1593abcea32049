#ifndef EDA_STATS_HPP
#define EDA_STATS_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "eda/network.hpp"

namespace eda {

// A cross-sectional network statistic.
struct Term {
  enum class Kind { edges, degree, gwesp, nodematch };

  Kind kind = Kind::edges;
  int k = 0;            // degree(k)
  double decay = 0.0;   // gwesp(decay), fixed
  std::string attribute;  // nodematch(attribute)

  static Term edges() { return {}; }
  static Term degree(int k);
  static Term gwesp(double decay);
  static Term nodematch(std::string attribute);

  // Parses "edges", "degree(1)", "gwesp(0.5)" or "nodematch(attr)".
  static Term parse(std::string_view spec);
  std::string name() const;

  friend bool operator==(const Term&, const Term&) = default;
};

// Parses a '+'-separated term list such as "edges+degree(1)+gwesp(0.5)".
std::vector<Term> parse_terms(std::string_view formula);
std::string format_terms(const std::vector<Term>& terms);

// Ergm potential theta . g(y).
struct Model {
  std::vector<Term> terms;
  std::vector<double> coefs;

  Model() = default;
  Model(std::vector<Term> terms, std::vector<double> coefs);

  std::size_t size() const { return terms.size(); }
};

double stat(const Term& term, const Network& net);
std::vector<double> stats(const std::vector<Term>& terms, const Network& net);

// g(net with d on) - g(net with d off), whatever the current state of d.
double change_stat(const Term& term, const Network& net, Dyad d);

double potential(const Model& model, const Network& net);

// log pi(net + d) / pi(net - d) = theta . delta g.
double conditional_logodds(const Model& model, const Network& net, Dyad d);

// pi(j) / pi(i) = exp(theta . (g(j) - g(i))). Neither network needs to be
// valid under any constraint.
double potential_ratio(const Model& model, const Network& net_i, const Network& net_j);

// Model files hold one "term=<spec>, coef=<real>" entry per line. Blank
// lines and lines starting with '#' are skipped.
Model read_model(std::istream& in);
void write_model(std::ostream& out, const Model& model);

}  // namespace eda

#endif  // EDA_STATS_HPP
