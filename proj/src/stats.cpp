#include "eda/stats.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace eda {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return x;
}

// Number of shared partners of a and b, not counting `excluded`.
std::size_t shared_partners(const Network& net, NodeId a, NodeId b, NodeId excluded) {
  if (net.degree(a) > net.degree(b)) std::swap(a, b);
  std::size_t count = 0;
  for (NodeId x : net.neighbors(a)) {
    if (x == b || x == excluded) continue;
    if (net.has_edge(x, b)) ++count;
  }
  return count;
}

constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Contribution of one edge with `sp` shared partners to gwesp(decay).
double gwesp_weight(double decay, std::size_t sp) {
  return std::exp(decay) * (1.0 - std::pow(1.0 - std::exp(-decay), static_cast<double>(sp)));
}

double degree_change(std::size_t base_degree, int k) {
  const auto kk = static_cast<std::size_t>(k);
  return static_cast<double>(base_degree + 1 == kk) - static_cast<double>(base_degree == kk);
}

}  // namespace

Term Term::degree(int k) {
  if (k < 0) throw std::invalid_argument("degree(k) needs k >= 0");
  Term t;
  t.kind = Kind::degree;
  t.k = k;
  return t;
}

Term Term::gwesp(double decay) {
  if (!(decay >= 0)) throw std::invalid_argument("gwesp decay must be nonnegative");
  Term t;
  t.kind = Kind::gwesp;
  t.decay = decay;
  return t;
}

Term Term::nodematch(std::string attribute) {
  Term t;
  t.kind = Kind::nodematch;
  t.attribute = std::move(attribute);
  return t;
}

Term Term::parse(std::string_view spec) {
  spec = trim(spec);
  if (spec == "edges") return edges();
  const auto open = spec.find('(');
  if (open == std::string_view::npos || !spec.ends_with(")"))
    throw std::invalid_argument("unknown term '" + std::string(spec) + "'");
  const auto head = spec.substr(0, open);
  const auto arg = trim(spec.substr(open + 1, spec.size() - open - 2));
  if (head == "degree") {
    const double k = parse_double(arg);
    if (k != std::floor(k)) throw std::invalid_argument("degree(k) needs an integer k");
    return degree(static_cast<int>(k));
  }
  if (head == "gwesp") return gwesp(parse_double(arg));
  if (head == "nodematch" && !arg.empty()) return nodematch(std::string(arg));
  throw std::invalid_argument("unknown term '" + std::string(spec) + "'");
}

std::string Term::name() const {
  switch (kind) {
    case Kind::edges:
      return "edges";
    case Kind::degree:
      return "degree(" + std::to_string(k) + ")";
    case Kind::gwesp:
      return "gwesp(" + format_double(decay) + ")";
    case Kind::nodematch:
      return "nodematch(" + attribute + ")";
  }
  return {};
}

std::vector<Term> parse_terms(std::string_view formula) {
  std::vector<Term> terms;
  while (!formula.empty()) {
    const auto plus = formula.find('+');
    terms.push_back(Term::parse(formula.substr(0, plus)));
    if (plus == std::string_view::npos) break;
    formula.remove_prefix(plus + 1);
  }
  if (terms.empty()) throw std::invalid_argument("empty term list");
  return terms;
}

std::string format_terms(const std::vector<Term>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += '+';
    out += t.name();
  }
  return out;
}

Model::Model(std::vector<Term> t, std::vector<double> c) : terms(std::move(t)), coefs(std::move(c)) {
  if (terms.size() != coefs.size()) throw std::invalid_argument("model needs one coefficient per term");
}

double stat(const Term& term, const Network& net) {
  switch (term.kind) {
    case Term::Kind::edges:
      return static_cast<double>(net.edge_count());
    case Term::Kind::degree: {
      std::size_t count = 0;
      for (NodeId v = 0; v < net.node_count(); ++v)
        if (net.degree(v) == static_cast<std::size_t>(term.k)) ++count;
      return static_cast<double>(count);
    }
    case Term::Kind::gwesp: {
      double total = 0;
      for (Dyad e : net.edges()) total += gwesp_weight(term.decay, shared_partners(net, e.a, e.b, kNoNode));
      return total;
    }
    case Term::Kind::nodematch: {
      const auto& attr = net.attribute(term.attribute);
      std::size_t count = 0;
      for (Dyad e : net.edges())
        if (attr[e.a] == attr[e.b]) ++count;
      return static_cast<double>(count);
    }
  }
  return 0;
}

std::vector<double> stats(const std::vector<Term>& terms, const Network& net) {
  std::vector<double> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(stat(t, net));
  return out;
}

double change_stat(const Term& term, const Network& net, Dyad d) {
  const bool on = net.has_edge(d);
  switch (term.kind) {
    case Term::Kind::edges:
      return 1.0;
    case Term::Kind::degree: {
      const std::size_t da = net.degree(d.a) - (on ? 1 : 0);
      const std::size_t db = net.degree(d.b) - (on ? 1 : 0);
      return degree_change(da, term.k) + degree_change(db, term.k);
    }
    case Term::Kind::gwesp: {
      // The new edge gets its own shared partners; each edge from an
      // endpoint to a common neighbour gains one.
      const NodeId u = d.a;
      const NodeId v = d.b;
      std::size_t common = 0;
      double delta = 0;
      const NodeId small = net.degree(u) <= net.degree(v) ? u : v;
      const NodeId other = small == u ? v : u;
      for (NodeId w : net.neighbors(small)) {
        if (w == other || !net.has_edge(w, other)) continue;
        ++common;
        const std::size_t s_uw = shared_partners(net, u, w, v);
        const std::size_t s_vw = shared_partners(net, v, w, u);
        delta += gwesp_weight(term.decay, s_uw + 1) - gwesp_weight(term.decay, s_uw);
        delta += gwesp_weight(term.decay, s_vw + 1) - gwesp_weight(term.decay, s_vw);
      }
      return delta + gwesp_weight(term.decay, common);
    }
    case Term::Kind::nodematch: {
      const auto& attr = net.attribute(term.attribute);
      return attr[d.a] == attr[d.b] ? 1.0 : 0.0;
    }
  }
  return 0;
}

double potential(const Model& model, const Network& net) {
  double total = 0;
  for (std::size_t t = 0; t < model.size(); ++t) {
    if (model.coefs[t] == 0) continue;
    total += model.coefs[t] * stat(model.terms[t], net);
  }
  return total;
}

double conditional_logodds(const Model& model, const Network& net, Dyad d) {
  double total = 0;
  for (std::size_t t = 0; t < model.size(); ++t) {
    if (model.coefs[t] == 0) continue;
    total += model.coefs[t] * change_stat(model.terms[t], net, d);
  }
  return total;
}

double potential_ratio(const Model& model, const Network& net_i, const Network& net_j) {
  if (net_i.node_count() != net_j.node_count())
    throw std::invalid_argument("potential_ratio needs networks on the same node set");
  double diff = 0;
  for (std::size_t t = 0; t < model.size(); ++t) {
    if (model.coefs[t] == 0) continue;
    diff += model.coefs[t] * (stat(model.terms[t], net_j) - stat(model.terms[t], net_i));
  }
  return std::exp(diff);
}

Model read_model(std::istream& in) {
  Model model;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    // "term=<spec>, coef=<real>"; the term spec itself contains no '='.
    const auto term_pos = view.find("term=");
    const auto coef_pos = view.find("coef=");
    if (term_pos == std::string_view::npos || coef_pos == std::string_view::npos || coef_pos < term_pos)
      throw std::runtime_error("model line " + std::to_string(lineno) + ": expected 'term=<spec>, coef=<real>'");
    auto term_spec = trim(view.substr(term_pos + 5, coef_pos - term_pos - 5));
    if (term_spec.ends_with(",")) term_spec.remove_suffix(1);
    model.terms.push_back(Term::parse(term_spec));
    model.coefs.push_back(parse_double(view.substr(coef_pos + 5)));
  }
  if (model.terms.empty()) throw std::runtime_error("model file has no terms");
  return model;
}

void write_model(std::ostream& out, const Model& model) {
  for (std::size_t t = 0; t < model.size(); ++t)
    out << "term=" << model.terms[t].name() << ", coef=" << format_double(model.coefs[t]) << '\n';
}

}  // namespace eda
