#include "eda/record.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace eda {

std::vector<double> SimulationRecord::column(std::size_t stat) const {
  std::vector<double> out;
  out.reserve(stat_series.size() - std::min(burn_in_rows, stat_series.size()));
  for (std::size_t row = burn_in_rows; row < stat_series.size(); ++row) out.push_back(stat_series[row].at(stat));
  return out;
}

Estimate SimulationRecord::estimate(std::size_t stat) const { return batch_means(column(stat)); }

std::vector<TimeStep> SimulationRecord::completed_ages(int type) const {
  std::vector<TimeStep> out;
  for (const auto& s : completed_spells)
    if (s.type == type) out.push_back(s.age);
  return out;
}

const DurationEstimate* DurationReport::find(int type) const {
  for (const auto& e : by_type)
    if (e.type == type) return &e;
  return nullptr;
}

DurationReport mean_duration_estimates(const std::vector<Spell>& completed,
                                       const std::vector<Spell>& censored) {
  struct Tally {
    double completed_total = 0;
    double censored_total = 0;
    std::size_t completed = 0;
    std::size_t censored = 0;
  };
  std::map<int, Tally> tallies;
  for (const auto& s : completed) {
    auto& t = tallies[s.type];
    t.completed_total += static_cast<double>(s.age);
    ++t.completed;
  }
  for (const auto& s : censored) {
    auto& t = tallies[s.type];
    t.censored_total += static_cast<double>(s.age);
    ++t.censored;
  }

  DurationReport report;
  for (const auto& [type, t] : tallies) {
    if (t.completed == 0) {
      report.warnings.push_back("no completed spells for dyad type " + std::to_string(type));
      continue;
    }
    DurationEstimate e;
    e.type = type;
    e.completed = t.completed;
    e.censored = t.censored;
    e.completed_mean = t.completed_total / static_cast<double>(t.completed);
    e.hazard_inverse = (t.completed_total + t.censored_total) / static_cast<double>(t.completed);
    report.by_type.push_back(e);
  }
  return report;
}

DurationReport mean_duration_estimates(const SimulationRecord& record) {
  return mean_duration_estimates(record.completed_spells, record.censored_spells);
}

void write_stats_csv(std::ostream& out, const SimulationRecord& record) {
  out << "step";
  for (const auto& name : record.stat_names) out << ',' << name;
  out << '\n';
  out.precision(17);
  for (std::size_t row = 0; row < record.stat_series.size(); ++row) {
    out << record.steps[row];
    for (double v : record.stat_series[row]) out << ',' << v;
    out << '\n';
  }
}

void write_spells_csv(std::ostream& out, const SimulationRecord& record) {
  out << "type,age,censored\n";
  for (const auto& s : record.completed_spells) out << s.type << ',' << s.age << ",0\n";
  for (const auto& s : record.censored_spells) out << s.type << ',' << s.age << ",1\n";
}

}  // namespace eda
