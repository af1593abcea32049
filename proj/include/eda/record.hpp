#ifndef EDA_RECORD_HPP
#define EDA_RECORD_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "eda/mc.hpp"
#include "eda/network.hpp"

namespace eda {

// Output of a tergm or R-chain run.
//
// stat_series holds one row per recorded step, burn-in included; the first
// burn_in_rows rows are the burn-in. Spells are recorded only for edges
// formed after burn-in, so the completed and censored lists together
// describe every spell started in the sampling window.
struct SimulationRecord {
  std::vector<std::string> stat_names;
  std::vector<TimeStep> steps;
  std::vector<std::vector<double>> stat_series;
  std::size_t burn_in_rows = 0;
  std::vector<Spell> completed_spells;
  std::vector<Spell> censored_spells;
  std::uint64_t seed = 0;
  nlohmann::json config;
  nlohmann::json diagnostics;

  // Post burn-in values of one monitored statistic.
  std::vector<double> column(std::size_t stat) const;
  Estimate estimate(std::size_t stat) const;
  std::vector<TimeStep> completed_ages(int type) const;
};

struct DurationEstimate {
  int type = 1;
  // Mean age of completed spells; biased low under right-censoring.
  double completed_mean = 0;
  // Edge-steps at risk (completed + censored ages) per dissolution.
  double hazard_inverse = 0;
  std::size_t completed = 0;
  std::size_t censored = 0;
};

struct DurationReport {
  std::vector<DurationEstimate> by_type;
  std::vector<std::string> warnings;

  const DurationEstimate* find(int type) const;
};

DurationReport mean_duration_estimates(const std::vector<Spell>& completed,
                                       const std::vector<Spell>& censored);
DurationReport mean_duration_estimates(const SimulationRecord& record);

// stats.csv: "step,<stat names...>" with every recorded row.
void write_stats_csv(std::ostream& out, const SimulationRecord& record);
// spells.csv: "type,age,censored".
void write_spells_csv(std::ostream& out, const SimulationRecord& record);

}  // namespace eda

#endif  // EDA_RECORD_HPP
