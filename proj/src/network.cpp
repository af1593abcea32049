#include "eda/network.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "eda/rng.hpp"

namespace eda {

Dyad Dyad::of(NodeId i, NodeId j) {
  if (i == j) throw std::invalid_argument("dyad endpoints must be distinct");
  return i < j ? Dyad{i, j} : Dyad{j, i};
}

Network::Network(std::size_t node_count) : adjacency_(node_count) {
  if (node_count == 0) throw std::invalid_argument("network needs at least one node");
}

std::vector<Dyad> Network::sorted_edges() const {
  std::vector<Dyad> out(edge_list_.begin(), edge_list_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<TimeStep> Network::formation_time(Dyad d) const {
  auto it = slots_.find(d.key());
  if (it == slots_.end()) return std::nullopt;
  return it->second.formed;
}

std::optional<TimeStep> Network::toggle(Dyad d, TimeStep time) {
  auto it = slots_.find(d.key());
  if (it == slots_.end()) {
    slots_.emplace(d.key(), Slot{edge_list_.size(), time});
    edge_list_.push_back(d);
    adjacency_[d.a].push_back(d.b);
    adjacency_[d.b].push_back(d.a);
    return std::nullopt;
  }

  const Slot slot = it->second;
  slots_.erase(it);
  if (slot.position + 1 != edge_list_.size()) {
    const Dyad moved = edge_list_.back();
    edge_list_[slot.position] = moved;
    slots_[moved.key()].position = slot.position;
  }
  edge_list_.pop_back();

  auto drop = [](std::vector<NodeId>& list, NodeId v) {
    auto pos = std::find(list.begin(), list.end(), v);
    *pos = list.back();
    list.pop_back();
  };
  drop(adjacency_[d.a], d.b);
  drop(adjacency_[d.b], d.a);
  return time - slot.formed;
}

void Network::set_attribute(const std::string& name, std::vector<int> values) {
  if (values.size() != node_count())
    throw std::invalid_argument("attribute '" + name + "' must have one value per node");
  attributes_[name] = std::move(values);
}

const std::vector<int>& Network::attribute(const std::string& name) const {
  auto it = attributes_.find(name);
  if (it == attributes_.end()) throw std::out_of_range("no node attribute '" + name + "'");
  return it->second;
}

bool Network::same_edges(const Network& other) const {
  if (node_count() != other.node_count() || edge_count() != other.edge_count()) return false;
  return std::all_of(edge_list_.begin(), edge_list_.end(),
                     [&](Dyad d) { return other.has_edge(d); });
}

Dyad uniform_dyad(std::size_t node_count, Rng& rng) {
  const auto i = static_cast<NodeId>(rng.below(node_count));
  auto j = static_cast<NodeId>(rng.below(node_count - 1));
  if (j >= i) ++j;
  return Dyad::of(i, j);
}

Network bernoulli_network(std::size_t node_count, double p, Rng& rng, TimeStep time) {
  Network net(node_count);
  for (NodeId i = 0; i < node_count; ++i)
    for (NodeId j = i + 1; j < node_count; ++j)
      if (rng.bernoulli(p)) net.toggle({i, j}, time);
  return net;
}

// --- DyadTyper ---

DyadTyper DyadTyper::homogeneous() { return {}; }

DyadTyper DyadTyper::by_match(std::vector<int> labels) {
  DyadTyper t;
  t.kind_ = Kind::match;
  t.type_count_ = 2;
  t.labels_ = std::move(labels);
  return t;
}

DyadTyper DyadTyper::by_pair(std::vector<int> labels) {
  DyadTyper t;
  t.kind_ = Kind::pair;
  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("pair typer labels must be nonnegative");
    max_label = std::max(max_label, l);
  }
  t.label_count_ = max_label + 1;
  t.type_count_ = t.label_count_ * (t.label_count_ + 1) / 2;
  t.labels_ = std::move(labels);
  return t;
}

int DyadTyper::type_of(Dyad d) const {
  switch (kind_) {
    case Kind::homogeneous:
      return 1;
    case Kind::match:
      return labels_.at(d.a) == labels_.at(d.b) ? 2 : 1;
    case Kind::pair: {
      int lo = labels_.at(d.a);
      int hi = labels_.at(d.b);
      if (lo > hi) std::swap(lo, hi);
      // Row-major index into the upper triangle of the L x L label grid.
      return lo * label_count_ - lo * (lo - 1) / 2 + (hi - lo) + 1;
    }
  }
  return 1;
}

// --- Constraint ---

Constraint Constraint::parse(std::string_view text) {
  if (text == "none") return none();
  auto parse_bound = [&](std::string_view prefix) -> std::optional<std::size_t> {
    if (!text.starts_with(prefix) || !text.ends_with(")")) return std::nullopt;
    auto inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    std::size_t b = 0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), b);
    if (ec != std::errc{} || ptr != inner.data() + inner.size()) return std::nullopt;
    return b;
  };
  if (auto b = parse_bound("max-degree(")) return max_degree(*b);
  if (auto b = parse_bound("min-degree(")) return min_degree(*b);
  throw std::invalid_argument("unknown constraint '" + std::string(text) + "'");
}

std::string Constraint::to_string() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::max_degree:
      return "max-degree(" + std::to_string(bound) + ")";
    case Kind::min_degree:
      return "min-degree(" + std::to_string(bound) + ")";
  }
  return "none";
}

bool is_valid(const Network& net, const Constraint& constraint) {
  for (NodeId v = 0; v < net.node_count(); ++v) {
    const std::size_t deg = net.degree(v);
    if (constraint.kind == Constraint::Kind::max_degree && deg > constraint.bound) return false;
    if (constraint.kind == Constraint::Kind::min_degree && deg < constraint.bound) return false;
  }
  return true;
}

bool toggle_is_valid(const Network& net, Dyad d, const Constraint& constraint) {
  const bool on = net.has_edge(d);
  const std::size_t da = net.degree(d.a);
  const std::size_t db = net.degree(d.b);
  switch (constraint.kind) {
    case Constraint::Kind::none:
      return true;
    case Constraint::Kind::max_degree:
      return on || (da + 1 <= constraint.bound && db + 1 <= constraint.bound);
    case Constraint::Kind::min_degree:
      return !on || (da >= constraint.bound + 1 && db >= constraint.bound + 1);
  }
  return true;
}

// --- serialization ---

void write_edgelist(std::ostream& out, const Network& net) {
  out << "nodes=" << net.node_count() << '\n';
  for (Dyad d : net.sorted_edges())
    out << d.a + 1 << ' ' << d.b + 1 << ' ' << *net.formation_time(d) << '\n';
}

Network read_edgelist(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("nodes="))
    throw std::runtime_error("edge list must start with 'nodes=<n>'");
  const std::size_t n = std::stoul(line.substr(6));
  Network net(n);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t i = 0, j = 0;
    TimeStep t = 0;
    if (!(fields >> i >> j >> t) || i < 1 || j < 1 || i > n || j > n || i == j)
      throw std::runtime_error("bad edge on line " + std::to_string(lineno));
    const Dyad d = Dyad::of(static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1));
    if (net.has_edge(d)) throw std::runtime_error("duplicate edge on line " + std::to_string(lineno));
    net.toggle(d, t);
  }
  return net;
}

}  // namespace eda
