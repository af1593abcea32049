#ifndef EDA_SRC_TNT_HPP
#define EDA_SRC_TNT_HPP

// Tie/no-tie Metropolis-Hastings kernel shared by the ergm sampler and the
// tergm formation phase.
//
// A pool describes two dyad sets: the "free" dyads that may be proposed
// uniformly (toggled on if empty, off if on) and the "active" edges that
// may be proposed for removal. With an empty active set every proposal
// goes to the free set; otherwise each set gets half the mass.

#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "eda/network.hpp"
#include "eda/rng.hpp"

namespace eda::detail {

// Whole-network pool: every dyad is free, every edge is active.
class ErgmPool {
 public:
  explicit ErgmPool(const Network& net) : net_(net) {}

  std::size_t free_count() const { return net_.dyad_count(); }
  std::size_t active_count() const { return net_.edge_count(); }
  Dyad draw_free(Rng& rng) const { return uniform_dyad(net_.node_count(), rng); }
  Dyad draw_active(Rng& rng) const { return net_.edges()[rng.below(net_.edge_count())]; }
  void added(Dyad) {}
  void removed(Dyad) {}

 private:
  const Network& net_;
};

// Formation-phase pool: free dyads are those empty at phase start, active
// edges are those added during the phase (stamped with the phase time).
class FormationPool {
 public:
  FormationPool(const Network& net, TimeStep phase)
      : net_(net), phase_(phase), free_(net.dyad_count() - net.edge_count()) {}

  std::size_t free_count() const { return free_; }
  std::size_t active_count() const { return added_.size(); }

  Dyad draw_free(Rng& rng) const {
    for (;;) {
      const Dyad d = uniform_dyad(net_.node_count(), rng);
      const auto formed = net_.formation_time(d);
      if (!formed || *formed == phase_) return d;
    }
  }

  Dyad draw_active(Rng& rng) const { return added_[rng.below(added_.size())]; }

  void added(Dyad d) {
    position_.emplace(d.key(), added_.size());
    added_.push_back(d);
  }

  void removed(Dyad d) {
    auto it = position_.find(d.key());
    const std::size_t pos = it->second;
    position_.erase(it);
    if (pos + 1 != added_.size()) {
      added_[pos] = added_.back();
      position_[added_[pos].key()] = pos;
    }
    added_.pop_back();
  }

 private:
  const Network& net_;
  TimeStep phase_;
  std::size_t free_;
  std::vector<Dyad> added_;
  std::unordered_map<std::uint64_t, std::size_t> position_;
};

// One proposal. `logodds(d)` must return log pi(net + d) / pi(net - d) for
// the target; infinite values are allowed. Returns true if accepted.
template <class Pool, class LogOdds>
bool tnt_propose(Network& net, Pool& pool, const LogOdds& logodds, const Constraint& constraint, TimeStep time,
                 Rng& rng) {
  const std::size_t free = pool.free_count();
  if (free == 0) return false;
  const std::size_t active = pool.active_count();
  const Dyad d = (active == 0 || rng.uniform() < 0.5) ? pool.draw_free(rng) : pool.draw_active(rng);
  if (!toggle_is_valid(net, d, constraint)) return false;

  const bool on = net.has_edge(d);
  const double f = static_cast<double>(free);
  const double l = logodds(d);
  double log_ratio = 0;
  if (on) {
    if (l == std::numeric_limits<double>::infinity()) return false;
    const double forward = 0.5 / f + 0.5 / static_cast<double>(active);
    const double reverse = active == 1 ? 1.0 / f : 0.5 / f;
    log_ratio = -l + std::log(reverse / forward);
  } else {
    if (l == -std::numeric_limits<double>::infinity()) return false;
    const double forward = active == 0 ? 1.0 / f : 0.5 / f;
    const double reverse = 0.5 / f + 0.5 / static_cast<double>(active + 1);
    log_ratio = l + std::log(reverse / forward);
  }
  if (log_ratio < 0 && !(rng.uniform() < std::exp(log_ratio))) return false;

  net.toggle(d, time);
  if (on)
    pool.removed(d);
  else
    pool.added(d);
  return true;
}

}  // namespace eda::detail

#endif  // EDA_SRC_TNT_HPP
