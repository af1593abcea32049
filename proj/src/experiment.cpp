#include "eda/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "eda/infsim.hpp"
#include "eda/oracle.hpp"
#include "eda/rng.hpp"
#include "eda/tergm.hpp"
#include "eda/transforms.hpp"

namespace eda {

namespace {

using json = nlohmann::json;

constexpr double kReferenceScale = 1000.0;  // node count the targets are stated for
constexpr double kSpotCheckZ = 3.0;

// A calibrated grid cell: one ergm, simulated for every duration and variant.
struct GridCell {
  CellParams params;
  std::vector<Term> terms;
  std::vector<double> targets;
};

struct Run {
  std::vector<Estimate> stats;
  Estimate duration;  // mean duration in natural units
  json diagnostics = json::object();
};

std::string fmt(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double edges_target(const GridCell& cell) { return cell.targets.front(); }

Estimate duration_estimate(const SimulationRecord& rec, double scale) {
  const auto report = mean_duration_estimates(rec);
  const DurationEstimate* d = report.find(1);
  if (d == nullptr || d->completed == 0) return {std::numeric_limits<double>::quiet_NaN(), 0, 0};
  const double mean = d->hazard_inverse / scale;
  return {mean, mean / std::sqrt(static_cast<double>(d->completed)), d->completed};
}

std::vector<Estimate> all_estimates(const SimulationRecord& rec) {
  std::vector<Estimate> out;
  for (std::size_t k = 0; k < rec.stat_names.size(); ++k) out.push_back(rec.estimate(k));
  return out;
}

json estimates_json(const std::vector<Estimate>& est) {
  json out = json::array();
  for (const auto& e : est) out.push_back({{"mean", e.mean}, {"se", e.se}});
  return out;
}

Network initial_network(std::size_t n, double edges, std::uint64_t seed, std::optional<std::size_t> edge_bound = {}) {
  const double dyads = static_cast<double>(n) * static_cast<double>(n - 1) / 2;
  Rng rng(seed);
  Network net = bernoulli_network(n, std::clamp(edges / dyads, 0.0, 1.0), rng);
  if (edge_bound && net.edge_count() > *edge_bound) return Network(n);
  return net;
}

Run run_tergm(const ExperimentConfig& cfg, const GridCell& cell, const Model& model, double duration,
              Variant variant, std::uint64_t seed) {
  TergmSpec spec = TergmSpec::eda(model, {duration}, variant);
  spec.proposals_per_phase =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(cfg.proposals_per_phase) *
                                                                      cfg.proposals_multiplier)));
  const std::size_t n = cell.params.node_count;
  const auto burn = static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.burn_in_durations) * duration));
  const auto steps = static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.steps_per_duration) * duration));

  Run run;
  const Network initial = initial_network(n, edges_target(cell), derive_seed(seed, 0));
  const auto rec = simulate_tergm(spec, initial, burn, steps, cell.terms, derive_seed(seed, 1));
  run.stats = all_estimates(rec);
  run.duration = duration_estimate(rec, 1.0);
  run.diagnostics = rec.diagnostics;
  run.diagnostics["proposals_per_phase"] = spec.proposals_per_phase;
  run.diagnostics["burn_in_steps"] = burn;
  run.diagnostics["steps"] = steps;

  if (cfg.spot_check) {
    TergmSpec doubled = spec;
    doubled.proposals_per_phase *= 2;
    const auto short_steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(cfg.spot_check_fraction * static_cast<double>(steps))));
    const auto check = simulate_tergm(doubled, initial, burn, short_steps, cell.terms, derive_seed(seed, 2));
    const auto est = all_estimates(check);
    double worst = 0;
    for (std::size_t k = 0; k < est.size(); ++k) worst = std::max(worst, z_distance(est[k], run.stats[k]));
    run.diagnostics["spot_check"] = {{"proposals_per_phase", doubled.proposals_per_phase},
                                     {"steps", short_steps},
                                     {"estimates", estimates_json(est)},
                                     {"max_z", worst},
                                     {"agree", worst <= kSpotCheckZ}};
  }
  return run;
}

Run run_r_chain(const ExperimentConfig& cfg, const GridCell& cell, const Model& model, double duration,
                std::uint64_t seed) {
  const std::size_t n = cell.params.node_count;
  const std::size_t dyads = n * (n - 1) / 2;
  const double mu = edges_target(cell);

  RSpec spec;
  spec.model = model;
  spec.duration_base = {duration};
  spec.proposal = parse_proposal(cfg.r_proposal);
  if (spec.proposal == ProposalKind::kTntAnalogue) {
    const auto bound = static_cast<std::size_t>(std::ceil(std::max(2 * mu, mu + 10 * std::sqrt(mu))));
    spec.edge_bound = std::min(bound, dyads - 1);
  }
  const Network initial = initial_network(n, mu, derive_seed(seed, 0), spec.edge_bound);
  if (spec.proposal == ProposalKind::kTntAnalogue)
    spec.odds_bound = estimate_odds_bound(model, spec.constraint, initial, cfg.r_pilot_proposals, derive_seed(seed, 2));
  spec.lambda = auto_lambda(spec, n, cfg.r_lambda_safety);

  const double lifetime = spec.lambda * duration;
  const auto thin = std::max<std::size_t>(
      1, static_cast<std::size_t>(lifetime / static_cast<double>(std::max<std::size_t>(1, cfg.r_samples_per_lifetime))));
  const auto burn = static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.r_burn_in_lifetimes) * lifetime));
  const auto steps = burn + static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.r_lifetimes) * lifetime));

  Run run;
  const auto rec = simulate_R(spec, initial, steps, cell.terms, derive_seed(seed, 1), thin, burn);
  run.stats = all_estimates(rec);
  run.duration = duration_estimate(rec, spec.lambda);
  run.diagnostics = rec.diagnostics;
  run.diagnostics["steps"] = steps;
  run.diagnostics["thin"] = thin;
  return run;
}

// Averages replicate runs; standard errors combine in quadrature.
Run combine(const std::vector<Run>& reps) {
  Run out = reps.front();
  const auto r = static_cast<double>(reps.size());
  if (reps.size() == 1) return out;
  auto merge = [&](auto get) {
    Estimate e;
    double var = 0;
    for (const auto& rep : reps) {
      e.mean += get(rep).mean / r;
      var += get(rep).se * get(rep).se;
      e.n += get(rep).n;
    }
    e.se = std::sqrt(var) / r;
    return e;
  };
  for (std::size_t k = 0; k < out.stats.size(); ++k) out.stats[k] = merge([k](const Run& x) { return x.stats[k]; });
  out.duration = merge([](const Run& x) { return x.duration; });
  out.diagnostics = json::object();
  json each = json::array();
  for (const auto& rep : reps) each.push_back(rep.diagnostics);
  out.diagnostics["replicates"] = std::move(each);
  return out;
}

StatResult make_stat(std::string name, double target, const Estimate& e) {
  StatResult s;
  s.statistic = std::move(name);
  s.target = target;
  s.mean = e.mean;
  s.se = e.se;
  s.rel_error = (e.mean - target) / target;
  s.rel_se = e.se / std::abs(target);
  return s;
}

std::vector<GridCell> sweep_cells(const ExperimentConfig& cfg, json& references) {
  const std::size_t n = cfg.effective_nodes();
  const double scale = static_cast<double>(n) / kReferenceScale;
  std::vector<GridCell> cells;
  if (cfg.design == Design::kDeg1Sweep) {
    const std::vector<Term> terms{Term::edges(), Term::degree(1)};
    for (double md : cfg.mean_degree) {
      const double di = dyad_independent_degree1(n, md);
      references.push_back({{"mean_degree", md}, {"degree1_dyad_independent", di}});
      std::vector<double> d1;
      for (double t : cfg.degree1_target) d1.push_back(t * scale);
      if (cfg.include_dyad_independent) d1.push_back(di);
      for (double t : d1) {
        GridCell c;
        c.params.node_count = n;
        c.params.mean_degree = md;
        c.params.degree1_target = t;
        c.terms = terms;
        c.targets = {static_cast<double>(n) * md / 2, t};
        cells.push_back(std::move(c));
      }
    }
  } else {
    const std::vector<Term> terms{Term::edges(), Term::degree(1), Term::degree(2), Term::gwesp(cfg.gwesp_decay)};
    for (double g : cfg.gwesp_target) {
      GridCell c;
      c.params.node_count = n;
      c.params.mean_degree = cfg.gwesp_mean_degree;
      c.params.degree1_target = cfg.gwesp_degree1_target * scale;
      c.params.degree2_target = cfg.degree2_target * scale;
      c.params.gwesp_target = g * scale;
      c.terms = terms;
      c.targets = {static_cast<double>(n) * cfg.gwesp_mean_degree / 2, c.params.degree1_target,
                   c.params.degree2_target, c.params.gwesp_target};
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

struct CellOutput {
  std::vector<CellResult> results;
  json calibration;
};

CellOutput run_grid_cell(const ExperimentConfig& cfg, const GridCell& cell, std::uint64_t seed) {
  CellOutput out;
  out.calibration = {{"node_count", cell.params.node_count},
                     {"mean_degree", cell.params.mean_degree},
                     {"degree1_target", cell.params.degree1_target},
                     {"degree2_target", cell.params.degree2_target},
                     {"gwesp_target", cell.params.gwesp_target},
                     {"terms", format_terms(cell.terms)},
                     {"targets", cell.targets}};
  std::optional<StochasticCalibration> cal;
  std::string cal_error;
  try {
    cal = calibrate_stochastic(cell.terms, cell.targets, cell.params.node_count, cfg.calibration, derive_seed(seed, 0));
    out.calibration["coefs"] = cal->coefs;
    out.calibration["estimates"] = estimates_json(cal->confirmation);
    out.calibration["rel_gaps"] = cal->rel_gaps;
    out.calibration["kept_start"] = cal->kept_start;
  } catch (const std::exception& e) {
    cal_error = std::string("calibration failed: ") + e.what();
    out.calibration["error"] = cal_error;
  }

  const std::size_t nv = cfg.variants.size();
  for (std::size_t di = 0; di < cfg.durations.size(); ++di)
    for (std::size_t vi = 0; vi < nv; ++vi) {
      CellResult r;
      r.design = cfg.design;
      r.params = cell.params;
      r.params.duration = cfg.durations[di];
      r.variant = cfg.variants[vi];
      if (!cal) {
        r.failed = true;
        r.error = cal_error;
        out.results.push_back(std::move(r));
        continue;
      }
      try {
        const Model model(cell.terms, cal->coefs);
        std::vector<Run> reps;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
          const std::uint64_t s = derive_seed(seed, 1 + (di * nv + vi) * cfg.replications + rep);
          if (r.variant == "R")
            reps.push_back(run_r_chain(cfg, cell, model, r.params.duration, s));
          else
            reps.push_back(run_tergm(cfg, cell, model, r.params.duration, parse_variant(r.variant), s));
        }
        const Run run = combine(reps);
        for (std::size_t k = 0; k < cell.terms.size(); ++k)
          r.stats.push_back(make_stat(cell.terms[k].name(), cell.targets[k], run.stats[k]));
        r.stats.push_back(make_stat("duration", r.params.duration, run.duration));
        r.diagnostics = run.diagnostics;
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
      }
      out.results.push_back(std::move(r));
    }
  return out;
}

std::vector<CellResult> run_single_dyad(const ExperimentConfig& cfg, double p, double duration, std::uint64_t seed) {
  std::vector<std::string> variants;
  for (const auto& v : cfg.variants)
    if (v != "R") variants.push_back(v);
  if (std::find(variants.begin(), variants.end(), "exact") == variants.end()) variants.push_back("exact");

  std::vector<CellResult> out;
  const double theta = logit(p);
  const Model model({Term::edges()}, {theta});
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    CellResult r;
    r.design = Design::kSingleDyad;
    r.params.node_count = 2;
    r.params.duration = duration;
    r.params.p = p;
    r.variant = variants[vi];
    try {
      const Variant v = parse_variant(r.variant);
      TergmSpec spec = v == Variant::kExact ? TergmSpec::eda_exact(model, {duration}, {theta})
                                            : TergmSpec::eda(model, {duration}, v);
      spec.proposals_per_phase = cfg.single_dyad_proposals;
      const auto burn = static_cast<std::size_t>(std::ceil(50 * duration));
      const auto rec = simulate_tergm(spec, Network(2), burn, cfg.single_dyad_steps, {Term::edges()},
                                      derive_seed(seed, vi));
      const Estimate prevalence = rec.estimate(0);
      r.stats.push_back(make_stat("edges", p, prevalence));
      r.stats.push_back(make_stat("edges_vs_stationary", approx_equilibrium(p, duration, v), prevalence));
      r.stats.push_back(make_stat("duration", duration, duration_estimate(rec, 1.0)));
      r.diagnostics = rec.diagnostics;
      r.diagnostics["theta_plus"] = theta + spec.offsets.front();
      r.diagnostics["theta_minus"] = spec.theta_minus(1);
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Runs tasks on up to `workers` threads; each task writes its own slot.
void run_parallel(std::vector<std::function<void()>>& tasks, std::size_t workers) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, tasks.size()));
  if (workers == 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
    });
  for (auto& t : pool) t.join();
}

template <class T>
T take(const json& j, const char* key) {
  return j.at(key).get<T>();
}

}  // namespace

Design parse_design(std::string_view name) {
  if (name == "deg1_sweep") return Design::kDeg1Sweep;
  if (name == "gwesp_sweep") return Design::kGwespSweep;
  if (name == "single_dyad") return Design::kSingleDyad;
  if (name == "oracle_suite") return Design::kOracleSuite;
  throw std::invalid_argument("unknown design '" + std::string(name) + "'");
}

std::string to_string(Design d) {
  switch (d) {
    case Design::kDeg1Sweep: return "deg1_sweep";
    case Design::kGwespSweep: return "gwesp_sweep";
    case Design::kSingleDyad: return "single_dyad";
    case Design::kOracleSuite: return "oracle_suite";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw std::invalid_argument("at least one variant is required");
  for (const auto& v : variants)
    if (v != "old" && v != "new" && v != "exact" && v != "R")
      throw std::invalid_argument("unknown variant '" + v + "'");
  if ((design == Design::kDeg1Sweep || design == Design::kGwespSweep) &&
      std::find(variants.begin(), variants.end(), "exact") != variants.end())
    throw std::invalid_argument("the exact transform applies to the single_dyad design only");
  if (effective_nodes() < 3) throw std::invalid_argument("sweeps need at least 3 nodes");
  if (replications == 0) throw std::invalid_argument("replications must be positive");
  if (durations.empty() && design != Design::kOracleSuite) throw std::invalid_argument("no durations given");
  for (double d : durations)
    if (!(d > 1)) throw std::invalid_argument("durations must exceed 1");
  if (!(proposals_multiplier > 0)) throw std::invalid_argument("proposals multiplier must be positive");
  if (!(spot_check_fraction > 0)) throw std::invalid_argument("spot check fraction must be positive");
  for (double md : mean_degree)
    if (!(md > 0)) throw std::invalid_argument("mean degrees must be positive");
  for (double p : single_dyad_p)
    if (!(p > 0 && p < 1)) throw std::invalid_argument("single_dyad p must lie in (0, 1)");
  parse_proposal(r_proposal);
}

json to_json(const ExperimentConfig& c) {
  const auto& k = c.calibration;
  return {
      {"design", to_string(c.design)},
      {"node_count", c.node_count},
      {"full_scale", c.full_scale},
      {"mean_degree", c.mean_degree},
      {"degree1_target", c.degree1_target},
      {"include_dyad_independent", c.include_dyad_independent},
      {"gwesp_mean_degree", c.gwesp_mean_degree},
      {"gwesp_degree1_target", c.gwesp_degree1_target},
      {"degree2_target", c.degree2_target},
      {"gwesp_target", c.gwesp_target},
      {"gwesp_decay", c.gwesp_decay},
      {"durations", c.durations},
      {"variants", c.variants},
      {"replications", c.replications},
      {"seed", c.seed},
      {"workers", c.workers},
      {"proposals_per_phase", c.proposals_per_phase},
      {"proposals_multiplier", c.proposals_multiplier},
      {"burn_in_durations", c.burn_in_durations},
      {"steps_per_duration", c.steps_per_duration},
      {"spot_check", c.spot_check},
      {"spot_check_fraction", c.spot_check_fraction},
      {"r_proposal", c.r_proposal},
      {"r_lifetimes", c.r_lifetimes},
      {"r_burn_in_lifetimes", c.r_burn_in_lifetimes},
      {"r_samples_per_lifetime", c.r_samples_per_lifetime},
      {"r_lambda_safety", c.r_lambda_safety},
      {"r_pilot_proposals", c.r_pilot_proposals},
      {"calibration",
       {{"tolerance", k.tolerance},
        {"iterations", k.iterations},
        {"samples_per_iteration", k.samples_per_iteration},
        {"sample_interval", k.sample_interval},
        {"burn_in", k.burn_in},
        {"pilot_samples", k.pilot_samples},
        {"confirm_samples", k.confirm_samples},
        {"accept_start", k.accept_start}}},
      {"single_dyad_p", c.single_dyad_p},
      {"single_dyad_steps", c.single_dyad_steps},
      {"single_dyad_proposals", c.single_dyad_proposals},
      {"oracle_nodes", c.oracle_nodes},
      {"oracle_constraints", c.oracle_constraints},
      {"oracle_models", c.oracle_models},
      {"oracle_lambdas", c.oracle_lambdas},
  };
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  json merged = to_json(ExperimentConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!merged.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    if (key == "calibration") {
      if (!value.is_object()) throw std::invalid_argument("calibration must be an object");
      for (const auto& [ck, cv] : value.items()) {
        if (!merged["calibration"].contains(ck)) throw std::invalid_argument("unknown calibration key '" + ck + "'");
        merged["calibration"][ck] = cv;
      }
    } else {
      merged[key] = value;
    }
  }

  ExperimentConfig c;
  c.design = parse_design(take<std::string>(merged, "design"));
  c.node_count = take<std::size_t>(merged, "node_count");
  c.full_scale = take<bool>(merged, "full_scale");
  c.mean_degree = take<std::vector<double>>(merged, "mean_degree");
  c.degree1_target = take<std::vector<double>>(merged, "degree1_target");
  c.include_dyad_independent = take<bool>(merged, "include_dyad_independent");
  c.gwesp_mean_degree = take<double>(merged, "gwesp_mean_degree");
  c.gwesp_degree1_target = take<double>(merged, "gwesp_degree1_target");
  c.degree2_target = take<double>(merged, "degree2_target");
  c.gwesp_target = take<std::vector<double>>(merged, "gwesp_target");
  c.gwesp_decay = take<double>(merged, "gwesp_decay");
  c.durations = take<std::vector<double>>(merged, "durations");
  c.variants = take<std::vector<std::string>>(merged, "variants");
  c.replications = take<std::size_t>(merged, "replications");
  c.seed = take<std::uint64_t>(merged, "seed");
  c.workers = take<std::size_t>(merged, "workers");
  c.proposals_per_phase = take<std::size_t>(merged, "proposals_per_phase");
  c.proposals_multiplier = take<double>(merged, "proposals_multiplier");
  c.burn_in_durations = take<std::size_t>(merged, "burn_in_durations");
  c.steps_per_duration = take<std::size_t>(merged, "steps_per_duration");
  c.spot_check = take<bool>(merged, "spot_check");
  c.spot_check_fraction = take<double>(merged, "spot_check_fraction");
  c.r_proposal = take<std::string>(merged, "r_proposal");
  c.r_lifetimes = take<std::size_t>(merged, "r_lifetimes");
  c.r_burn_in_lifetimes = take<std::size_t>(merged, "r_burn_in_lifetimes");
  c.r_samples_per_lifetime = take<std::size_t>(merged, "r_samples_per_lifetime");
  c.r_lambda_safety = take<double>(merged, "r_lambda_safety");
  c.r_pilot_proposals = take<std::size_t>(merged, "r_pilot_proposals");
  const json& k = merged.at("calibration");
  c.calibration.tolerance = take<double>(k, "tolerance");
  c.calibration.iterations = take<std::size_t>(k, "iterations");
  c.calibration.samples_per_iteration = take<std::size_t>(k, "samples_per_iteration");
  c.calibration.sample_interval = take<std::size_t>(k, "sample_interval");
  c.calibration.burn_in = take<std::size_t>(k, "burn_in");
  c.calibration.pilot_samples = take<std::size_t>(k, "pilot_samples");
  c.calibration.confirm_samples = take<std::size_t>(k, "confirm_samples");
  c.calibration.accept_start = take<bool>(k, "accept_start");
  c.single_dyad_p = take<std::vector<double>>(merged, "single_dyad_p");
  c.single_dyad_steps = take<std::size_t>(merged, "single_dyad_steps");
  c.single_dyad_proposals = take<std::size_t>(merged, "single_dyad_proposals");
  c.oracle_nodes = take<std::vector<std::size_t>>(merged, "oracle_nodes");
  c.oracle_constraints = take<std::vector<std::string>>(merged, "oracle_constraints");
  c.oracle_models = take<std::vector<std::string>>(merged, "oracle_models");
  c.oracle_lambdas = take<std::vector<double>>(merged, "oracle_lambdas");
  c.validate();
  return c;
}

double dyad_independent_degree1(std::size_t node_count, double mean_degree) {
  const auto n = static_cast<double>(node_count);
  const double p = mean_degree / (n - 1);
  return n * (n - 1) * p * std::pow(1 - p, n - 2);
}

Model parse_model_spec(std::string_view text) {
  std::istringstream in{std::string(text)};
  Model m;
  std::string item;
  while (in >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("model item '" + item + "' needs term=coef");
    m.terms.push_back(Term::parse(item.substr(0, eq)));
    m.coefs.push_back(std::stod(item.substr(eq + 1)));
  }
  if (m.terms.empty()) throw std::invalid_argument("empty model spec");
  return m;
}

const StatResult* CellResult::find(std::string_view statistic) const {
  for (const auto& s : stats)
    if (s.statistic == statistic) return &s;
  return nullptr;
}

bool ErrorTable::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; });
}

std::vector<const CellResult*> ErrorTable::select(double duration, std::string_view variant) const {
  std::vector<const CellResult*> out;
  for (const auto& c : cells)
    if (c.params.duration == duration && c.variant == variant) out.push_back(&c);
  return out;
}

ErrorTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  ErrorTable table;
  table.design = config.design;
  std::vector<std::function<void()>> tasks;

  if (config.design == Design::kOracleSuite) {
    struct Item {
      std::size_t nodes;
      std::string constraint;
      std::string model;
    };
    std::vector<Item> items;
    for (std::size_t n : config.oracle_nodes)
      for (const auto& c : config.oracle_constraints)
        for (const auto& m : config.oracle_models) items.push_back({n, c, m});
    std::vector<json> reports(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
      tasks.push_back([&, i] {
        try {
          const StateSpace space(items[i].nodes, Constraint::parse(items[i].constraint));
          const Model model = parse_model_spec(items[i].model);
          reports[i] = oracle_report(space, model, DurationSpec{{1.0}, 1.0, DyadTyper::homogeneous()},
                                     config.oracle_lambdas);
        } catch (const std::exception& e) {
          reports[i] = {{"nodes", items[i].nodes}, {"constraint", items[i].constraint}, {"error", e.what()}};
        }
      });
    run_parallel(tasks, config.workers);
    for (std::size_t i = 0; i < items.size(); ++i) {
      reports[i]["model"] = items[i].model;
      if (reports[i].contains("error")) {
        CellResult failed;
        failed.design = Design::kOracleSuite;
        failed.params.node_count = items[i].nodes;
        failed.variant = items[i].model;
        failed.failed = true;
        failed.error = reports[i]["error"];
        table.cells.push_back(std::move(failed));
      }
      table.oracle.push_back(std::move(reports[i]));
    }
    return table;
  }

  if (config.design == Design::kSingleDyad) {
    std::vector<std::pair<double, double>> grid;
    for (double p : config.single_dyad_p)
      for (double d : config.durations) grid.emplace_back(p, d);
    std::vector<std::vector<CellResult>> results(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      tasks.push_back([&, i] {
        results[i] = run_single_dyad(config, grid[i].first, grid[i].second, derive_seed(config.seed, i));
      });
    run_parallel(tasks, config.workers);
    for (auto& r : results)
      for (auto& c : r) table.cells.push_back(std::move(c));
    return table;
  }

  const auto cells = sweep_cells(config, table.references);
  std::vector<CellOutput> outputs(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    tasks.push_back([&, i] { outputs[i] = run_grid_cell(config, cells[i], derive_seed(config.seed, i)); });
  run_parallel(tasks, config.workers);
  for (auto& o : outputs) {
    table.calibrations.push_back(std::move(o.calibration));
    for (auto& c : o.results) table.cells.push_back(std::move(c));
  }
  return table;
}

void write_plotdata(std::ostream& out, const ErrorTable& table) {
  out << "design,node_count,mean_degree,degree1_target,degree2_target,gwesp_target,duration,p,variant,statistic,"
         "rel_error,stderr\n";
  for (const auto& c : table.cells) {
    const auto& q = c.params;
    const std::string prefix = to_string(c.design) + "," + std::to_string(q.node_count) + "," + fmt(q.mean_degree) +
                               "," + fmt(q.degree1_target) + "," + fmt(q.degree2_target) + "," +
                               fmt(q.gwesp_target) + "," + fmt(q.duration) + "," + fmt(q.p) + "," + c.variant + ",";
    if (c.failed) {
      out << prefix << "FAILED,NA,NA\n";
      continue;
    }
    for (const auto& s : c.stats) out << prefix << s.statistic << "," << fmt(s.rel_error) << "," << fmt(s.rel_se) << "\n";
  }
}

json to_json(const ErrorTable& table) {
  json cells = json::array();
  for (const auto& c : table.cells) {
    json stats = json::array();
    for (const auto& s : c.stats)
      stats.push_back({{"statistic", s.statistic},
                       {"target", s.target},
                       {"mean", s.mean},
                       {"se", s.se},
                       {"rel_error", s.rel_error},
                       {"stderr", s.rel_se}});
    const auto& q = c.params;
    cells.push_back({{"design", to_string(c.design)},
                     {"node_count", q.node_count},
                     {"mean_degree", q.mean_degree},
                     {"degree1_target", q.degree1_target},
                     {"degree2_target", q.degree2_target},
                     {"gwesp_target", q.gwesp_target},
                     {"duration", q.duration},
                     {"p", q.p},
                     {"variant", c.variant},
                     {"failed", c.failed},
                     {"error", c.error},
                     {"stats", std::move(stats)},
                     {"diagnostics", c.diagnostics}});
  }
  return {{"design", to_string(table.design)},
          {"failed", table.any_failed()},
          {"cells", std::move(cells)},
          {"calibrations", table.calibrations},
          {"references", table.references},
          {"oracle", table.oracle}};
}

void emit_plotdata(const ErrorTable& table, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (table.design == Design::kOracleSuite) {
    std::ofstream(out_dir / "oracle_report.json") << table.oracle.dump(2) << "\n";
  } else {
    if (table.cells.empty()) throw std::invalid_argument("error table is empty");
    std::ofstream csv(out_dir / "errors.csv");
    write_plotdata(csv, table);
  }
  std::ofstream(out_dir / "results.json") << to_json(table).dump(2) << "\n";
}

}  // namespace eda
