#ifndef EDA_NETWORK_HPP
#define EDA_NETWORK_HPP

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eda {

class Rng;

using NodeId = std::uint32_t;
using TimeStep = std::int64_t;

// Unordered pair of distinct nodes, stored canonically with a < b.
struct Dyad {
  NodeId a = 0;
  NodeId b = 0;

  static Dyad of(NodeId i, NodeId j);

  std::uint64_t key() const { return (static_cast<std::uint64_t>(a) << 32) | b; }

  friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

// A completed (or censored) edge spell: dyad type and age in time steps.
struct Spell {
  int type = 1;
  TimeStep age = 0;
};

// Undirected simple graph on a fixed node set. Each edge carries the time
// step at which it was formed. Completed spells are handed back to the
// caller by toggle() rather than stored here, so a Network is purely the
// cross-sectional state.
class Network {
 public:
  explicit Network(std::size_t node_count);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t dyad_count() const { return node_count() * (node_count() - 1) / 2; }
  std::size_t edge_count() const { return edge_list_.size(); }

  bool has_edge(Dyad d) const { return slots_.contains(d.key()); }
  bool has_edge(NodeId i, NodeId j) const { return has_edge(Dyad::of(i, j)); }

  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }

  // Edges in internal (insertion/swap-remove) order; stable for a given
  // history of toggles, which keeps simulations reproducible.
  std::span<const Dyad> edges() const { return edge_list_; }
  std::vector<Dyad> sorted_edges() const;

  std::optional<TimeStep> formation_time(Dyad d) const;

  // Flips the edge state of `d`. Turning an edge on stamps it with `time`;
  // turning it off returns its age `time - formation_time`.
  std::optional<TimeStep> toggle(Dyad d, TimeStep time);

  // Named categorical node attributes (used by nodematch terms and dyad
  // typers). Values must have one entry per node.
  void set_attribute(const std::string& name, std::vector<int> values);
  const std::vector<int>& attribute(const std::string& name) const;
  bool has_attribute(const std::string& name) const { return attributes_.contains(name); }

  // Same node count and edge set; formation times are ignored.
  bool same_edges(const Network& other) const;

 private:
  struct Slot {
    std::size_t position;
    TimeStep formed;
  };

  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Dyad> edge_list_;
  std::unordered_map<std::uint64_t, Slot> slots_;
  std::map<std::string, std::vector<int>> attributes_;
};

// Uniformly random dyad of an n-node network (n >= 2).
Dyad uniform_dyad(std::size_t node_count, Rng& rng);

// Independent Bernoulli(p) edges on every dyad, stamped with `time`.
Network bernoulli_network(std::size_t node_count, double p, Rng& rng, TimeStep time = 0);

// Dyad-independent typing. Types are positive integers 1..type_count().
class DyadTyper {
 public:
  static DyadTyper homogeneous();
  // Type 1 for dyads whose endpoint labels differ, 2 when they match.
  static DyadTyper by_match(std::vector<int> labels);
  // One type per unordered pair of labels; labels must lie in [0, L).
  static DyadTyper by_pair(std::vector<int> labels);

  int type_of(Dyad d) const;
  int type_count() const { return type_count_; }
  bool is_homogeneous() const { return kind_ == Kind::homogeneous; }

 private:
  enum class Kind { homogeneous, match, pair };

  Kind kind_ = Kind::homogeneous;
  int type_count_ = 1;
  int label_count_ = 0;
  std::vector<int> labels_;
};

// Cross-sectional degree constraints evaluated on the instantaneous network.
struct Constraint {
  enum class Kind { none, max_degree, min_degree };

  Kind kind = Kind::none;
  std::size_t bound = 0;

  static Constraint none() { return {}; }
  static Constraint max_degree(std::size_t b) { return {Kind::max_degree, b}; }
  static Constraint min_degree(std::size_t b) { return {Kind::min_degree, b}; }

  // Parses "none", "max-degree(b)" or "min-degree(b)".
  static Constraint parse(std::string_view text);
  std::string to_string() const;

  // Whether the single-toggle graph over valid states is guaranteed to be
  // connected (cross-sectional exactness).
  bool guarantees_connectivity() const { return true; }
  // Whether every free edge can always be toggled off (durational exactness).
  bool guarantees_free_off_toggles() const { return kind != Kind::min_degree; }

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

bool is_valid(const Network& net, const Constraint& constraint);

// True iff toggling `d` keeps a valid network valid.
bool toggle_is_valid(const Network& net, Dyad d, const Constraint& constraint);

// Edge-list text format: "nodes=<n>" header, then one "i j formation_time"
// line per edge with 1-based ids, sorted lexicographically.
void write_edgelist(std::ostream& out, const Network& net);
Network read_edgelist(std::istream& in);

}  // namespace eda

#endif  // EDA_NETWORK_HPP
